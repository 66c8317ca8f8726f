//! The three data-selection rules. None of them ever sees the iterates.

use infobudget::model::{sample_index, DataPoint, Dataset, Sampler};
use infobudget::rng::{stream, Purpose};

fn main() -> infobudget::Result<()> {
    let data = Dataset::new((0..5).map(|i| DataPoint::unlabeled(vec![i as f64])).collect())?;
    let samplers = [
        ("uniform", Sampler::UniformIid),
        ("shuffle", Sampler::ShuffleWithoutReplacement),
        ("importance", Sampler::importance(vec![0.4, 0.3, 0.15, 0.1, 0.05])?),
    ];
    for (name, sampler) in samplers {
        let mut rng = stream(9, Purpose::Sampling);
        let mut history = Vec::new();
        for t in 1..=15 {
            let i = sample_index(&sampler, &data, &history, t, &mut rng)?;
            history.push(i);
        }
        let counts: Vec<usize> = (0..5).map(|k| history.iter().filter(|i| **i == k).count()).collect();
        println!("{name:<10} {history:?} counts {counts:?}");
    }
    Ok(())
}
