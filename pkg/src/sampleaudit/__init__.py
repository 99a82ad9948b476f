"""sampleaudit: statistical auditing of generated sample batches.

Decides whether a candidate batch of samples is consistent with a
reference dataset by comparing raw-value distributions (KS test, JSD,
ECDFs), distributions of extracted features (spectral centroid and
slope moments, note durations), and by checking candidates against
pitch-class transition specifications mined from the reference.
"""

__version__ = "0.1.0"

from .baselines import BaselineConfig, fit_bernoulli, fit_exponential, generate
from .dataset import (
    Dataset,
    Sample,
    ValueDomain,
    binarize,
    pool_values,
    pool_values_channel,
    scale_to_symmetric,
    scale_to_unit,
)
from .estimators import (
    DistributionComparator,
    MelSpectrogram,
    RandomBaseline,
    TransitionSpecMiner,
)
from .features import (
    MomentVector,
    SlopeConfig,
    chroma,
    feature_distribution,
    moments,
    note_durations,
    spectral_centroid,
    spectral_slope,
)
from .ingest import (
    FormatError,
    load_store,
    read_cifar10,
    read_idx,
    read_pianoroll_csv,
    read_raster,
    read_wav,
    save_store,
    write_raster,
)
from .melspec import MelConfig, mel_filterbank, melspectrogram, patchify, stft_power
from .stats import (
    ComparisonReport,
    Ecdf,
    Histogram,
    KsResult,
    ReportRow,
    compare,
    ecdf,
    histogram,
    jsd,
    ks_two_sample,
)
from .transitions import (
    TransitionSpec,
    count_violations,
    mine_spec,
    spec_from_json,
    spec_to_json,
    violations_per_sample,
)

__all__ = [
    "__version__",
    "BaselineConfig", "fit_bernoulli", "fit_exponential", "generate",
    "Dataset", "Sample", "ValueDomain", "binarize", "pool_values",
    "pool_values_channel", "scale_to_symmetric", "scale_to_unit",
    "DistributionComparator", "MelSpectrogram", "RandomBaseline", "TransitionSpecMiner",
    "MomentVector", "SlopeConfig", "chroma", "feature_distribution", "moments",
    "note_durations", "spectral_centroid", "spectral_slope",
    "FormatError", "load_store", "read_cifar10", "read_idx", "read_pianoroll_csv",
    "read_raster", "read_wav", "save_store", "write_raster",
    "MelConfig", "mel_filterbank", "melspectrogram", "patchify", "stft_power",
    "ComparisonReport", "Ecdf", "Histogram", "KsResult", "ReportRow",
    "compare", "ecdf", "histogram", "jsd", "ks_two_sample",
    "TransitionSpec", "count_violations", "mine_spec", "spec_from_json",
    "spec_to_json", "violations_per_sample",
]
