//! Double description: generators of an H-cone {x : ⟨a_i, x⟩ ≥ 0}.
//!
//! Incremental Motzkin iteration that carries a lineality basis explicitly,
//! so non-pointed cones (and the whole space) are handled. Rays are kept
//! normalized to unit max-norm; adjacency uses the combinatorial test.

const EPS: f64 = 1e-10;

#[derive(Clone, Debug, Default)]
pub(crate) struct ConeGens {
    pub lineality: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

impl ConeGens {
    /// Conic generators: rays plus ± each lineality vector.
    pub(crate) fn generators(&self) -> Vec<Vec<f64>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|v| -v).collect());
        }
        out
    }
}

#[derive(Clone)]
struct Ray {
    v: Vec<f64>,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut Vec<u64>, i: usize) {
    let w = i / 64;
    if bits.len() <= w {
        bits.resize(w + 1, 0);
    }
    bits[w] |= 1 << (i % 64);
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, x)| x & !b.get(i).copied().unwrap_or(0) == 0)
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_normalize(v: &mut [f64]) -> bool {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m <= EPS {
        return false;
    }
    for x in v.iter_mut() {
        *x /= m;
        if x.abs() < 1e-15 {
            *x = 0.0;
        }
    }
    true
}

/// Extreme rays and lineality of {x ∈ ℝⁿ : ⟨a, x⟩ ≥ 0 for every row a}.
pub(crate) fn h_to_v(rows: &[Vec<f64>], n: usize) -> ConeGens {
    let mut cons: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut r = r.clone();
        if !max_normalize(&mut r) {
            continue;
        }
        if cons.iter().any(|c| c.iter().zip(&r).all(|(a, b)| (a - b).abs() <= 1e-12)) {
            continue;
        }
        cons.push(r);
    }

    let mut lin: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (j, a) in cons.iter().enumerate() {
        let vals: Vec<f64> = lin.iter().map(|l| dot(a, l)).collect();
        let pivot = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > EPS)
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .map(|(i, _)| i);
        if let Some(p) = pivot {
            let mut l0 = lin.remove(p);
            let mut s0 = vals[p];
            if s0 < 0.0 {
                l0.iter_mut().for_each(|v| *v = -*v);
                s0 = -s0;
            }
            for l in lin.iter_mut() {
                let c = dot(a, l) / s0;
                for (x, y) in l.iter_mut().zip(&l0) {
                    *x -= c * y;
                }
                max_normalize(l);
            }
            for r in rays.iter_mut() {
                let c = dot(a, &r.v) / s0;
                for (x, y) in r.v.iter_mut().zip(&l0) {
                    *x -= c * y;
                }
                bit_set(&mut r.zeros, j);
            }
            rays.retain_mut(|r| max_normalize(&mut r.v));
            let mut zeros = Vec::new();
            for i in 0..j {
                bit_set(&mut zeros, i);
            }
            max_normalize(&mut l0);
            rays.push(Ray { v: l0, zeros });
            dedupe(&mut rays);
            continue;
        }

        let s: Vec<f64> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let dq = n - lin.len();
        let mut next: Vec<Ray> = Vec::new();
        for (r, sv) in rays.iter().zip(&s) {
            if *sv > EPS {
                next.push(r.clone());
            } else if *sv >= -EPS {
                let mut r = r.clone();
                bit_set(&mut r.zeros, j);
                next.push(r);
            }
        }
        for (pi, sp) in s.iter().enumerate() {
            if *sp <= EPS {
                continue;
            }
            for (ni, sn) in s.iter().enumerate() {
                if *sn >= -EPS {
                    continue;
                }
                let common = bits_and(&rays[pi].zeros, &rays[ni].zeros);
                if dq >= 2 && popcount(&common) + 2 < dq {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(k, r)| {
                    k != pi && k != ni && bits_subset(&common, &r.zeros)
                });
                if blocked {
                    continue;
                }
                let mut v: Vec<f64> = rays[ni]
                    .v
                    .iter()
                    .zip(&rays[pi].v)
                    .map(|(nv, pv)| sp * nv - sn * pv)
                    .collect();
                if !max_normalize(&mut v) {
                    continue;
                }
                let mut zeros = common;
                bit_set(&mut zeros, j);
                next.push(Ray { v, zeros });
            }
        }
        rays = next;
        dedupe(&mut rays);
    }

    let mut out = ConeGens {
        lineality: lin,
        rays: rays.into_iter().map(|r| r.v).collect(),
    };
    out.lineality.iter_mut().for_each(|l| {
        max_normalize(l);
    });
    out.rays.sort_by(|a, b| lex(a, b));
    out
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn dedupe(rays: &mut Vec<Ray>) {
    let mut out: Vec<Ray> = Vec::with_capacity(rays.len());
    for r in rays.drain(..) {
        if let Some(e) = out
            .iter_mut()
            .find(|e| e.v.iter().zip(&r.v).all(|(a, b)| (a - b).abs() <= 1e-9))
        {
            for (i, w) in r.zeros.iter().enumerate() {
                if e.zeros.len() <= i {
                    e.zeros.resize(i + 1, 0);
                }
                e.zeros[i] |= w;
            }
        } else {
            out.push(r);
        }
    }
    *rays = out;
}
