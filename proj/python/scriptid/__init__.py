"""Script identification from Gabor texture features of quad-tree blocks."""

from ._scriptid import (
    DEFAULT_KERNEL_SIZE,
    DEFAULT_SIGMA,
    FEATURE_COUNT,
    DataError,
    DegenerateError,
    FormatError,
    IoError,
    Model,
    ParameterError,
    ScriptIdError,
    block_features,
    convolve,
    decompose,
    evaluate,
    feature_names,
    gabor_kernel,
    load_image,
    otsu_threshold,
    page_features,
    preprocess,
    synth_page,
)

__all__ = [
    "DEFAULT_KERNEL_SIZE",
    "DEFAULT_SIGMA",
    "FEATURE_COUNT",
    "DataError",
    "DegenerateError",
    "FormatError",
    "IoError",
    "Model",
    "ParameterError",
    "ScriptIdError",
    "block_features",
    "convolve",
    "decompose",
    "evaluate",
    "feature_names",
    "gabor_kernel",
    "load_image",
    "otsu_threshold",
    "page_features",
    "preprocess",
    "synth_page",
]
