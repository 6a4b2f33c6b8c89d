from bayes_fuzzy_ocr.datasets.corpus import (
    CorpusEntry,
    generate_touching_corpus,
    load_labeled_pbm_dir,
    read_corpus,
    write_corpus,
)
from bayes_fuzzy_ocr.datasets.glyphs import (
    LabeledGlyph,
    TouchingPair,
    build_training_set,
    crop_to_ink,
    encode_glyph,
    one_hot,
    stratified_subset,
    synth_touching,
)
from bayes_fuzzy_ocr.datasets.idx import (
    load_idx_images,
    load_idx_labels,
    load_mnist,
    write_idx_images,
    write_idx_labels,
)
from bayes_fuzzy_ocr.datasets.netpbm import load_netpbm, load_pbm, load_pgm, write_pbm
