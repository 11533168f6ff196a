"""Deep belief network training with pluggable model-expectation backends."""

from ._core import (
    CalibrationConfig,
    CalibrationReport,
    CgDataset,
    ChimeraGraph,
    DataError,
    DbnModel,
    Estimator,
    ExpectationSet,
    ExperimentConfig,
    HardwareRanges,
    NoiseModel,
    NumericalError,
    RbmParams,
    ResultRecord,
    SamplerConfig,
    SummaryRow,
    TrainSchedule,
    backprop_finetune,
    build_chimera,
    calibrate,
    clamped_expectations,
    coarse_grain,
    config_digest,
    default_beta_for,
    evaluate,
    exact_expectations,
    forward,
    hidden_probabilities,
    load_config,
    load_dataset,
    load_model,
    load_results,
    log_partition_function,
    make_estimator,
    missing_masks,
    one_hot,
    pretrain,
    propagate,
    pseudoinverse_init,
    random_rbm,
    run_comparison,
    save_config,
    save_dataset,
    save_model,
    split_training_sets,
    summarize,
    write_plot_script,
    write_summary,
    write_synthetic_corpus,
)

__all__ = [name for name in dir() if not name.startswith("_")]
