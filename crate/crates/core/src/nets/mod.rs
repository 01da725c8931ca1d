//! Recurrent models: cells, losses, Adam, checkpoints, and training.

mod adam;
mod cell;
mod checkpoint;
mod loss;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use cell::{
    backward, eval_loss, forward, gradient_check, CellKind, CellParams, GradCheckReport,
    TrajectoryRecord,
};
pub use checkpoint::{
    checkpoint_bytes, checkpoint_from_bytes, load_checkpoint, save_checkpoint,
};
pub use loss::{loss_ce_smoothed, loss_mse, LossKind, Targets};
pub use train::{evaluate, train, ExperimentReport, TrainConfig};
