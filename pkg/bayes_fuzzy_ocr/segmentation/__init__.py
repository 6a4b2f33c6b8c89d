from bayes_fuzzy_ocr.segmentation.config import FuzzyConfig
from bayes_fuzzy_ocr.segmentation.features import (
    ColumnFeatures,
    center_distance,
    compute_features,
    crossing_count,
    normalize_complement,
    peak_to_valley,
    second_difference,
    vertical_projection,
)
from bayes_fuzzy_ocr.segmentation.fuzzy import (
    FuzzyPartition,
    RuleBase,
    Trapezoid,
    default_rule_base,
    infer,
)
from bayes_fuzzy_ocr.segmentation.image import GlyphImage
from bayes_fuzzy_ocr.segmentation.segment import (
    CUT_METHODS,
    CutScore,
    baseline_cut,
    blank_cut,
    blank_gaps,
    locate_cut,
    score_columns,
    score_rows,
    segment,
    select_cut,
)
