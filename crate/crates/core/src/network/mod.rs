//! The path-based neural classifier: edge embeddings, an LSTM path encoder,
//! count-weighted pooling and a softmax output layer, trained with Adam.

mod adam;
mod lstm;
mod model;
mod table;
mod train;

pub use adam::{adam_step, AdamState};
pub use lstm::{LstmGrads, LstmParams, LstmTrace};
pub use model::{
    instance_rng, is_positive, loss_and_gradients, pool_paths, predict_all, softmax, BatchItem, Dims, EdgeRows,
    EncodedPair, Gradients, Mode, NetworkParams, GROUP_NAMES,
};
pub use table::EmbeddingTable;
pub use train::{train, train_with, Checkpoint, EpochStats, TrainConfig, TrainOutcome};
