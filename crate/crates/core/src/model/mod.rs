//! Domain types: data, losses, tasks, schedules, samplers, output functions.

pub mod data;
pub mod loss;
pub mod sampler;
pub mod schedule;
pub mod task;
pub mod trajectory;
pub mod vector;

pub use data::{uniform_in_ball, DataDistribution, DataPoint, Dataset};
pub use loss::{sub_gaussian_constant, LossModel};
pub use sampler::{sample_index, Sampler, SamplerConfig, SamplerKind};
pub use schedule::{NoiseKind, Schedule, ScheduleConfig, StepKind};
pub use task::{TaskConfig, TaskSpec};
pub use trajectory::{apply_output, fmt_f64, OutputFunction, Trajectory};
pub use vector::clip_to_ball;
