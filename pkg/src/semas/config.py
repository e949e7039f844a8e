"""Default tunables and their hard ranges.

Values here are the initialization points for the live policy
{w1, w2, rho, tau} plus the clamp ranges every update is projected
back into.  Anything marked "artifact-defined" has no upstream source
and exists only to make the action-utility selection concrete.
"""

# Consensus weights: w1 applies to the statistical detector (B1),
# w2 to the 5-model ensemble (B2).  Renormalized to w1 + w2 = 1.
INITIAL_W1 = 0.42
INITIAL_W2 = 0.58
W_RANGE = (0.3, 0.7)

# Contamination used to calibrate every detector's vote threshold.
INITIAL_RHO = 0.32
RHO_RANGE = (0.25, 0.35)

# Alert threshold on the fused score.  Unless pinned in the run config,
# the initial value is the (1 - rho) quantile of fused training scores
# plus seeded jitter, so the random start lands in the discriminative zone.
TAU_RANGE = (0.05, 0.95)
TAU_INIT_JITTER = 0.08

# Per-component cap on a single policy-update step.
ACTION_DELTA_LIMIT = 0.05

# Sliding-window feature extraction.
WINDOW_SIZE = 100
WINDOW_RANGE = (50, 200)
SPECTRAL_BANDS = 4

# Detector bank.
IF_N_TREES = 200
IF_MAX_SAMPLES = 256
OCSVM_NU = 0.25
OCSVM_RFF_DIM = 256
LOF_K = 20

# Severity bands on the fused score: low < 0.6 <= medium <= 0.8 < high.
SEVERITY_MEDIUM = 0.6
SEVERITY_HIGH = 0.8

# Reward weights: alpha * F1 - beta * |dP - dR| - gamma_lat * latency_ms.
REWARD_ALPHA = 1.0
REWARD_BETA = 0.1
REWARD_GAMMA_LAT = 0.001

# PPO optimizer.
PPO_LR = 3e-4
PPO_CLIP = 0.2
PPO_DISCOUNT = 0.99
PPO_GAE_LAMBDA = 0.95
PPO_UPDATES_PER_ITER = 10
PPO_BATCH = 64
PPO_REPLAY_CAPACITY = 10_000

# Action-utility criteria weights (uniform; artifact-defined).
UTILITY_WEIGHTS = (0.25, 0.25, 0.25, 0.25)

DEFAULT_SEEDS = (42, 123, 456)
DEFAULT_ITERATIONS = 3
DEFAULT_FOG_INSTANCES = 2
