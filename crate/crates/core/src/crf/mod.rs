//! Feature-based linear-chain CRF: Table-style feature extraction,
//! exact inference, elastic-net training via orthant-wise LBFGS, and
//! random hyperparameter search.

pub mod features;
pub mod inference;
pub mod model;
pub mod objective;
pub mod owlqn;
pub mod train;

pub use features::{build_feature_index, extract_features, FeatureConfig, FeatureGroups, FeatureIndex, FeatureSet};
pub use inference::{forward_backward, logsumexp, path_score, viterbi, Marginals};
pub use model::{CrfModel, CrfWeights, LabelAlphabet, TrainMeta, MODEL_FORMAT_VERSION};
pub use objective::{nll_and_gradient, Instance};
pub use owlqn::{minimize, IterationRecord, OwlQnOptions};
pub use train::{
    prepare_training_data, random_search, tag_crf, train, train_prepared, PreparedDataset,
    SearchResult, SearchTrial, TrainOptions,
};
