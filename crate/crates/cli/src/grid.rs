//! Parameter lists on the command line: `0.1,0.2,0.5` or an inclusive `start:stop:step`.

use anyhow::{bail, Context, Result};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let a: f64 = a.trim().parse().with_context(|| format!("bad grid start in {spec:?}"))?;
            let b: f64 = b.trim().parse().with_context(|| format!("bad grid stop in {spec:?}"))?;
            let step: f64 = step.trim().parse().with_context(|| format!("bad grid step in {spec:?}"))?;
            if !(step > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
                bail!("grid {spec:?} needs start <= stop and a positive step");
            }
            let count = ((b - a) / step).round() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [_] => spec
            .split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}")))
            .collect(),
        _ => bail!("grid {spec:?} is neither a list nor start:stop:step"),
    }
}
