"""dhtoolkit Core Module - hypothesis testing and channel coding numerics"""

from .hypothesis_testing import (
    NeymanPearsonSolver,
    Tolerances,
    DualScanConfig,
    HypothesisTestResult,
    optimal_test,
    dh,
    dh_dual_oracle,
    relative_entropy,
    renyi0,
    classical_neyman_pearson,
)
from .cq_channel import (
    CQChannel,
    InputDistribution,
    JointState,
    joint_state,
    dh_cq,
    converse_bound,
    achievable_rate,
    optimize_achievability,
    one_shot_bounds,
    holevo_information,
    holevo_capacity,
)
from .coding import (
    Codebook,
    DecodingPOVM,
    RandomCodingSimulator,
    square_root_decoder,
    evaluate_code,
    random_coding_experiment,
    check_hayashi_nagaoka,
)
from .asymptotics import tensor_power, stein_table, product_channel, capacity_rows

__all__ = [
    'NeymanPearsonSolver',
    'Tolerances',
    'DualScanConfig',
    'HypothesisTestResult',
    'optimal_test',
    'dh',
    'dh_dual_oracle',
    'relative_entropy',
    'renyi0',
    'classical_neyman_pearson',
    'CQChannel',
    'InputDistribution',
    'JointState',
    'joint_state',
    'dh_cq',
    'converse_bound',
    'achievable_rate',
    'optimize_achievability',
    'one_shot_bounds',
    'holevo_information',
    'holevo_capacity',
    'Codebook',
    'DecodingPOVM',
    'RandomCodingSimulator',
    'square_root_decoder',
    'evaluate_code',
    'random_coding_experiment',
    'check_hayashi_nagaoka',
    'tensor_power',
    'stein_table',
    'product_channel',
    'capacity_rows',
]
