//! Root extraction for nonnegative, real-rooted coefficient sequences.
//!
//! The input is a polynomial with nonnegative coefficients whose roots are
//! all real and <= 0 (up to float rounding of the coefficients). Roots are
//! read off a companion matrix; eigenvalues are then merged into clusters of
//! increasing radius until the reconstructed polynomial matches the input.
//! Clustering matters because a root of multiplicity m is scattered by
//! coefficient rounding into a cluster of radius ~eps^(1/m) that can reach
//! far into the complex plane; the cluster centroid recovers the root to
//! first order, and the residual gate decides which merge radius is right.

use nalgebra::{Complex, DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RootError {
    /// No cluster radius produced a reconstruction within the residual cap;
    /// the coefficients are not those of a nonpositive-real-rooted polynomial.
    NotRealRooted { best_residual: f64 },
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factored {
    /// One Bernoulli success probability per nominal degree, descending.
    /// A root at 0 contributes 1; a missing top degree contributes 0;
    /// a root -beta < 0 contributes 1/(1 + beta).
    pub success_probs: Vec<f64>,
    /// max |reconstructed - input| / max input.
    pub residual: f64,
}

/// Relative merge radii tried in order, scaled by (1 + max |eigenvalue|).
/// Steps of ~3x: the workable radius window (cluster diameter up to the
/// nearest foreign root) can span less than a decade, so decade jumps can
/// hop over it.
const MERGE_LADDER: [f64; 23] = [
    0.0, 1e-12, 1e-10, 1e-8, 1e-7, 3e-7, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2,
    3e-2, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4,
];

pub(crate) fn factor_nonnegative_real_rooted(
    coeffs: &[f64],
    residual_cap: f64,
) -> Result<Factored, RootError> {
    if coeffs.is_empty() {
        return Err(RootError::Invalid("empty coefficient sequence".into()));
    }
    for (i, &c) in coeffs.iter().enumerate() {
        if !c.is_finite() {
            return Err(RootError::Invalid(format!("coeffs[{i}] = {c} is not finite")));
        }
        if c < 0.0 {
            return Err(RootError::Invalid(format!("coeffs[{i}] = {c:e} is negative")));
        }
    }
    let Some(first_nz) = coeffs.iter().position(|&c| c > 0.0) else {
        return Err(RootError::Invalid("all coefficients are zero".into()));
    };
    let last_nz = coeffs.iter().rposition(|&c| c > 0.0).unwrap();
    let zeros_low = first_nz;
    let deficiency = coeffs.len() - 1 - last_nz;
    let core = &coeffs[first_nz..=last_nz];
    let degree = core.len() - 1;

    if degree == 0 {
        let probs = assemble_probs(&[], zeros_low, deficiency);
        let residual = reconstruction_residual(coeffs, &probs);
        return Ok(Factored {
            success_probs: probs,
            residual,
        });
    }

    let monic: Vec<f64> = core.iter().map(|c| c / core[degree]).collect();
    // Polishing evaluates at the natural coefficient scale: the monic form
    // can spread coefficients over many orders of magnitude (tiny leading
    // term), raising the Horner noise floor far above what double-root
    // refinement tolerates.
    let peak_core = core.iter().fold(0.0_f64, |m, &c| m.max(c));
    let natural: Vec<f64> = core.iter().map(|c| c / peak_core).collect();
    let mut eigs = companion_eigenvalues(&monic);
    eigs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let scale = 1.0 + eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut best_residual = f64::INFINITY;
    let mut best: Option<Vec<f64>> = None;
    for rel in MERGE_LADDER {
        let Some(roots) = cluster_roots(&eigs, rel * scale, scale) else {
            continue;
        };
        let polished = polish_roots(&natural, &roots);
        let mut candidates = vec![polished.clone()];
        // A merged cluster may really be several distinct roots whose
        // eigenvalues splayed into the complex plane: resolving it through
        // the local Taylor polynomial recovers the split, while a true
        // multiple root survives the round trip (its local roots regroup).
        // Both readings are scored; the residual gate picks one.
        if polished.iter().any(|&(_, m)| m >= 2) {
            let mut alt = Vec::with_capacity(polished.len());
            for &(r, m) in &polished {
                match resolve_cluster(&natural, r, m) {
                    Some(parts) => alt.extend(parts),
                    None => alt.push((r, m)),
                }
            }
            candidates.push(polish_roots(&natural, &alt));
        }
        for candidate in candidates {
            let probs = assemble_probs(&candidate, zeros_low, deficiency);
            let residual = reconstruction_residual(coeffs, &probs);
            if residual < best_residual {
                best_residual = residual;
                best = Some(probs.clone());
            }
            // Local polish bottoms out at the flat spot coefficient noise
            // carves around a multiple root; fitting the whole coefficient
            // vector still pins the root to machine precision.
            if residual > residual_cap && residual < 1e-2 {
                if let Some(refined) = refine_success_probs(coeffs, &probs) {
                    let residual = reconstruction_residual(coeffs, &refined);
                    if residual < best_residual {
                        best_residual = residual;
                        best = Some(refined);
                    }
                }
            }
        }
        if best_residual <= residual_cap {
            break;
        }
    }
    match best {
        Some(success_probs) if best_residual <= residual_cap => Ok(Factored {
            success_probs,
            residual: best_residual,
        }),
        _ => Err(RootError::NotRealRooted { best_residual }),
    }
}

fn companion_eigenvalues(monic: &[f64]) -> Vec<Complex<f64>> {
    let d = monic.len() - 1;
    let m = DMatrix::<f64>::from_fn(d, d, |r, c| {
        if c == d - 1 {
            -monic[r]
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().copied().collect()
}

/// Single-linkage clusters of radius `radius`; returns (root, multiplicity)
/// pairs or None when some cluster is not conjugate-closed (its net
/// imaginary part cannot cancel) or sits genuinely right of zero.
fn cluster_roots(
    eigs: &[Complex<f64>],
    radius: f64,
    scale: f64,
) -> Option<Vec<(f64, usize)>> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut label: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        match label[root] {
            Some(c) => clusters[c].push(i),
            None => {
                label[root] = Some(clusters.len());
                clusters.push(vec![i]);
            }
        }
    }
    let mut out = Vec::with_capacity(clusters.len());
    for members in &clusters {
        let net_im: f64 = members.iter().map(|&i| eigs[i].im).sum();
        if net_im.abs() > 1e-9 * scale * members.len() as f64 {
            return None;
        }
        let mean_re: f64 = members.iter().map(|&i| eigs[i].re).sum::<f64>() / members.len() as f64;
        if mean_re > 1e-6 * scale {
            return None;
        }
        out.push((mean_re.min(0.0), members.len()));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Some(out)
}

/// Polishes each cluster as a simple root of the (m-1)-th derivative. A
/// multiplicity-m root of p is an exact simple root of p^(m-1), and plain
/// Newton on a simple root reaches machine precision; Newton on p itself
/// cannot, because |p| ~ delta^m near a multiple root drops below float
/// evaluation noise while the location error delta is still ~1e-8.
fn polish_roots(coeffs: &[f64], roots: &[(f64, usize)]) -> Vec<(f64, usize)> {
    roots
        .iter()
        .map(|&(r0, m)| {
            let mut target = coeffs.to_vec();
            for _ in 1..m {
                target = derivative(&target);
            }
            let mut r = r0;
            let mut fr = horner(&target, r).abs();
            for _ in 0..24 {
                let (p, dp) = horner_with_derivative(&target, r);
                if dp == 0.0 {
                    break;
                }
                let next = (r - p / dp).min(0.0);
                let fnext = horner(&target, next).abs();
                if !(fnext < fr) {
                    break;
                }
                r = next;
                fr = fnext;
            }
            (r, m)
        })
        .collect()
}

/// Re-reads one multiplicity-m cluster through the degree-m Taylor
/// polynomial at its center. Distinct real roots that were merged only
/// because their eigenvalues splayed complex come back apart here; the
/// shifts of a true multiple root land within noise of zero and regroup.
fn resolve_cluster(coeffs: &[f64], center: f64, m: usize) -> Option<Vec<(f64, usize)>> {
    if !(2..=6).contains(&m) {
        return None;
    }
    let local = taylor_at(coeffs, center, m);
    let lead = local[m];
    if lead == 0.0 || !lead.is_finite() {
        return None;
    }
    let monic: Vec<f64> = local.iter().map(|c| c / lead).collect();
    let mut shifts: Vec<f64> = companion_eigenvalues(&monic)
        .iter()
        .map(|e| e.re)
        .filter(|re| re.is_finite())
        .collect();
    if shifts.len() != m {
        return None;
    }
    shifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Conjugate pairs share a real part, so chaining nearby shifts back
    // into groups restores the multiplicity of anything that never split.
    let radius = 1e-6 * (1.0 + center.abs());
    let mut groups: Vec<(f64, usize)> = Vec::with_capacity(m);
    let mut previous = f64::NEG_INFINITY;
    for shift in shifts {
        match groups.last_mut() {
            Some((sum, count)) if shift - previous <= radius => {
                *sum += shift;
                *count += 1;
            }
            _ => groups.push((shift, 1)),
        }
        previous = shift;
    }
    Some(
        groups
            .into_iter()
            .map(|(sum, count)| ((center + sum / count as f64).min(0.0), count))
            .collect(),
    )
}

/// Taylor coefficients p(x), p'(x), p''(x)/2, ... up to the given order.
fn taylor_at(coeffs: &[f64], x: f64, order: usize) -> Vec<f64> {
    let mut local = Vec::with_capacity(order + 1);
    let mut d = coeffs.to_vec();
    let mut factorial = 1.0;
    for k in 0..=order {
        if k > 0 {
            factorial *= k as f64;
            d = derivative(&d);
        }
        local.push(horner(&d, x) / factorial);
    }
    local
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn horner_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Success probabilities for the full nominal degree, sorted descending:
/// `zeros_low` certain successes, 1/(1+beta) per root -beta, `deficiency`
/// certain failures.
fn assemble_probs(roots: &[(f64, usize)], zeros_low: usize, deficiency: usize) -> Vec<f64> {
    let mut probs = Vec::with_capacity(zeros_low + deficiency + roots.len());
    probs.extend(std::iter::repeat(1.0).take(zeros_low));
    for &(r, m) in roots {
        let beta = -r;
        let q = 1.0 / (1.0 + beta);
        probs.extend(std::iter::repeat(q).take(m));
    }
    probs.extend(std::iter::repeat(0.0).take(deficiency));
    probs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    probs
}

/// Gauss-Newton over the distinct success probabilities, minimizing the
/// 2-norm of (reconstruction - coeffs). Repeated probabilities move as one
/// unknown, so a multiple root stays multiple; certain outcomes (0 and 1)
/// are exact and stay frozen.
fn refine_success_probs(coeffs: &[f64], probs: &[f64]) -> Option<Vec<f64>> {
    let norm: f64 = coeffs.iter().sum();
    if !(norm > 0.0) {
        return None;
    }
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for &q in probs {
        match groups.last_mut() {
            Some((g, c)) if *g == q => *c += 1,
            _ => groups.push((q, 1)),
        }
    }
    let free: Vec<usize> = groups
        .iter()
        .enumerate()
        .filter(|&(_, &(q, _))| q > 0.0 && q < 1.0)
        .map(|(i, _)| i)
        .collect();
    if free.is_empty() {
        return None;
    }
    let len = coeffs.len();
    // Bernoulli product over the groups, `skip_one` at one fewer factor.
    let build = |groups: &[(f64, usize)], skip_one: Option<usize>| -> Vec<f64> {
        let mut r = vec![0.0; len];
        r[0] = norm;
        let mut l = 1;
        for (k, &(q, m)) in groups.iter().enumerate() {
            let reps = if skip_one == Some(k) { m - 1 } else { m };
            for _ in 0..reps {
                for h in (0..l).rev() {
                    let keep = r[h] * (1.0 - q);
                    r[h + 1] += r[h] * q;
                    r[h] = keep;
                }
                l += 1;
            }
        }
        r
    };
    let sq_err = |r: &[f64]| -> f64 {
        r.iter().zip(coeffs).map(|(a, b)| (a - b) * (a - b)).sum()
    };

    let mut current = groups;
    let mut best_err = sq_err(&build(&current, None));
    for _ in 0..12 {
        let recon = build(&current, None);
        let mut jac = DMatrix::<f64>::zeros(len, free.len());
        for (col, &gi) in free.iter().enumerate() {
            // d/dq of ((1-q) + q z)^m pulls out m (z - 1) times the
            // product with one factor removed.
            let deflated = build(&current, Some(gi));
            let mult = current[gi].1 as f64;
            for row in 0..len {
                let shifted = if row == 0 { 0.0 } else { deflated[row - 1] };
                jac[(row, col)] = mult * (shifted - deflated[row]);
            }
        }
        let err_vec =
            DVector::<f64>::from_iterator(len, recon.iter().zip(coeffs).map(|(a, b)| a - b));
        let jt = jac.transpose();
        let mut jtj = &jt * &jac;
        let rhs = &jt * &err_vec;
        for i in 0..free.len() {
            // Levenberg damping keeps near-collinear columns solvable.
            jtj[(i, i)] += 1e-14 * (1.0 + jtj[(i, i)]);
        }
        let Some(delta) = jtj.lu().solve(&rhs) else {
            break;
        };
        let mut improved = false;
        let mut step = 1.0;
        for _ in 0..8 {
            let mut trial = current.clone();
            let mut valid = true;
            for (col, &gi) in free.iter().enumerate() {
                let q = trial[gi].0 - step * delta[col];
                if !(q > 0.0 && q < 1.0) {
                    valid = false;
                    break;
                }
                trial[gi].0 = q;
            }
            if valid {
                let err = sq_err(&build(&trial, None));
                if err < best_err {
                    best_err = err;
                    current = trial;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let mut out: Vec<f64> = current
        .iter()
        .flat_map(|&(q, m)| std::iter::repeat(q).take(m))
        .collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Some(out)
}

/// max |prod - coeffs| / max coeffs where prod = (sum coeffs) * product of
/// ((1 - q) + q z).
pub(crate) fn reconstruction_residual(coeffs: &[f64], success_probs: &[f64]) -> f64 {
    let norm: f64 = coeffs.iter().sum();
    let mut recon = vec![0.0; coeffs.len()];
    recon[0] = norm;
    let mut len = 1;
    for &q in success_probs {
        for h in (0..len).rev() {
            let keep = recon[h] * (1.0 - q);
            recon[h + 1] += recon[h] * q;
            recon[h] = keep;
        }
        len += 1;
    }
    let peak = coeffs.iter().fold(0.0_f64, |m, &c| m.max(c.abs()));
    coeffs
        .iter()
        .zip(&recon)
        .map(|(c, r)| (c - r).abs())
        .fold(0.0_f64, f64::max)
        / peak
}
