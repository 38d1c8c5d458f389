//! Derivative-free Nelder–Mead descent.
//!
//! Coefficients are the standard ones: reflection 1, expansion 2,
//! contraction 0.5, shrink 0.5. The objective may return `+inf` for points
//! it refuses to rank; those are treated as worse than every finite value.

/// Outcome of one descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub step: f64,
    pub max_iterations: usize,
    /// Stop when the spread of simplex values drops below this.
    pub ftol: f64,
    /// and the simplex diameter drops below this.
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            step: 0.1,
            max_iterations: 400,
            ftol: 1e-10,
            xtol: 1e-9,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `f` starting from `x0`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        nan_to_inf(f(x))
    };
    if n == 0 {
        let v = eval(x0, &mut evals);
        return SimplexResult {
            x: Vec::new(),
            value: v,
            evaluations: evals,
            iterations: 0,
            converged: true,
        };
    }

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    while iterations < opts.max_iterations {
        // stable sort keeps the ordering deterministic on ties
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];

        let spread = vals[worst] - vals[best];
        let diam = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread.abs() <= opts.ftol || (vals[best].is_infinite() && vals[worst] == vals[best]))
            && diam <= opts.xtol
        {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[i]) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        for j in 0..n {
            trial[j] = centroid[j] + REFLECT * (centroid[j] - pts[worst][j]);
        }
        let fr = eval(&trial, &mut evals);

        if fr < vals[best] {
            for j in 0..n {
                trial2[j] = centroid[j] + EXPAND * (trial[j] - centroid[j]);
            }
            let fe = eval(&trial2, &mut evals);
            if fe < fr {
                pts[worst].copy_from_slice(&trial2);
                vals[worst] = fe;
            } else {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = fr;
            continue;
        }
        // contraction, outside if the reflection helped at all
        let outside = fr < vals[worst];
        for j in 0..n {
            trial2[j] = if outside {
                centroid[j] + CONTRACT * (trial[j] - centroid[j])
            } else {
                centroid[j] + CONTRACT * (pts[worst][j] - centroid[j])
            };
        }
        let fc = eval(&trial2, &mut evals);
        if (outside && fc <= fr) || (!outside && fc < vals[worst]) {
            pts[worst].copy_from_slice(&trial2);
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for &i in &order[1..] {
            for j in 0..n {
                pts[i][j] = anchor[j] + SHRINK * (pts[i][j] - anchor[j]);
            }
            vals[i] = eval(&pts[i], &mut evals);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)))
        .unwrap();
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        evaluations: evals,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &SimplexOptions {
                max_iterations: 2000,
                ..Default::default()
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn rosenbrock() {
        let r = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &SimplexOptions {
                step: 0.5,
                max_iterations: 5000,
                ftol: 1e-14,
                xtol: 1e-10,
            },
        );
        assert!(r.value < 1e-8, "{r:?}");
    }

    #[test]
    fn infinite_region_is_avoided() {
        let r = minimize(
            |x| if x[0] < 0.5 { f64::INFINITY } else { x[0] },
            &[1.0],
            &SimplexOptions {
                max_iterations: 500,
                ..Default::default()
            },
        );
        assert!(r.value >= 0.5 && r.value < 0.51);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| x.iter().map(|v| v.sin() * v).sum::<f64>();
        let a = minimize(f, &[0.3, -0.2, 0.9], &SimplexOptions::default());
        let b = minimize(f, &[0.3, -0.2, 0.9], &SimplexOptions::default());
        assert_eq!(a, b);
    }
}
