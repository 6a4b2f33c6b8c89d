from bayes_fuzzy_ocr.bench.experiments import (
    ExperimentConfig,
    RunRecord,
    SweepReport,
    prepare_training_set,
    run_init_compare,
    run_segment_compare,
    run_train,
)
from bayes_fuzzy_ocr.bench.registry import CUT_METHODS, INITIALIZERS, register_all
