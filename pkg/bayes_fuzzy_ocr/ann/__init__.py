from bayes_fuzzy_ocr.ann.bayes_init import (
    FusionState,
    InitConfig,
    InitReport,
    LayerFusion,
    bayes_initialize,
    bayes_initialize_with_report,
    fuse,
    measure_noise_variance,
)
from bayes_fuzzy_ocr.ann.mlp import (
    LayerDeltas,
    Mlp,
    TrainConfig,
    TrainingSet,
    TrainReport,
    backward,
    forward,
    forward_batch,
    random_initialize,
    train,
)
from bayes_fuzzy_ocr.ann.serialization import load_mlp, save_mlp
from bayes_fuzzy_ocr.ann.structured import (
    StructuredCov,
    structured_add,
    structured_inverse,
    structured_matvec,
)
