//! Dense tensors over a chart.

use std::sync::Arc;

use curvscan_symbolic::{sum_exprs, Expr};
use rayon::prelude::*;

use crate::chart::{Chart, Metric};
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

#[derive(Debug, Clone)]
pub struct Tensor {
    chart: Arc<Chart>,
    slots: Vec<Variance>,
    comps: Vec<Expr>,
}

/// Iterates all multi-indices of the given rank in row-major order.
pub fn multi_indices(n: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(rank as u32);
    (0..total).map(move |flat| unflatten(flat, n, rank))
}

fn unflatten(mut flat: usize, n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for k in (0..rank).rev() {
        idx[k] = flat % n;
        flat /= n;
    }
    idx
}

impl Tensor {
    pub fn zeros(chart: Arc<Chart>, slots: Vec<Variance>) -> Tensor {
        let len = chart.dim().pow(slots.len() as u32);
        Tensor {
            chart,
            slots,
            comps: vec![Expr::zero(); len],
        }
    }

    pub fn scalar(chart: Arc<Chart>, value: Expr) -> Tensor {
        Tensor {
            chart,
            slots: Vec::new(),
            comps: vec![value],
        }
    }

    /// Builds components in parallel from a function of the multi-index.
    pub fn from_fn<F>(chart: Arc<Chart>, slots: Vec<Variance>, f: F) -> Tensor
    where
        F: Fn(&[usize]) -> Expr + Sync,
    {
        let n = chart.dim();
        let rank = slots.len();
        let total = n.pow(rank as u32);
        let comps = (0..total)
            .into_par_iter()
            .map(|flat| f(&unflatten(flat, n, rank)))
            .collect();
        Tensor { chart, slots, comps }
    }

    pub fn from_components(chart: Arc<Chart>, slots: Vec<Variance>, comps: Vec<Expr>) -> Result<Tensor> {
        let len = chart.dim().pow(slots.len() as u32);
        if comps.len() != len {
            return Err(CoreError::SlotVariance(format!(
                "expected {len} components, got {}",
                comps.len()
            )));
        }
        Ok(Tensor { chart, slots, comps })
    }

    /// Vector with upper index.
    pub fn vector(chart: Arc<Chart>, comps: Vec<Expr>) -> Result<Tensor> {
        Tensor::from_components(chart, vec![Variance::Up], comps)
    }

    /// Covariant metric as a tensor.
    pub fn metric(g: &Metric) -> Tensor {
        Tensor::from_fn(g.chart().clone(), vec![Variance::Down; 2], |i| g.g(i[0], i[1]).clone())
    }

    pub fn inverse_metric(g: &Metric) -> Tensor {
        Tensor::from_fn(g.chart().clone(), vec![Variance::Up; 2], |i| g.inv(i[0], i[1]).clone())
    }

    /// Mixed identity δ^a_b.
    pub fn delta(chart: Arc<Chart>) -> Tensor {
        Tensor::from_fn(chart, vec![Variance::Up, Variance::Down], |i| {
            if i[0] == i[1] {
                Expr::one()
            } else {
                Expr::zero()
            }
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Variance] {
        &self.slots
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let n = self.dim();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Expr) {
        let k = self.flat_index(idx);
        self.comps[k] = value;
    }

    pub fn as_scalar(&self) -> Option<&Expr> {
        if self.slots.is_empty() {
            Some(&self.comps[0])
        } else {
            None
        }
    }

    /// Multi-indices and values of the structurally nonzero components.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, &Expr)> {
        let n = self.dim();
        let rank = self.rank();
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(k, e)| (unflatten(k, n, rank), e))
            .collect()
    }

    /// Exact test that every component vanishes.
    pub fn is_zero(&self) -> Result<bool> {
        for e in &self.comps {
            if !e.is_zero_checked()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First component that is not exactly zero, if any.
    pub fn first_nonzero(&self) -> Result<Option<Vec<usize>>> {
        for (k, e) in self.comps.iter().enumerate() {
            if !e.is_zero_checked()? {
                return Ok(Some(unflatten(k, self.dim(), self.rank())));
            }
        }
        Ok(None)
    }

    fn check_compatible(&self, other: &Tensor) -> Result<()> {
        if self.chart != other.chart && *self.chart != *other.chart {
            return Err(CoreError::ChartMismatch);
        }
        if self.slots != other.slots {
            return Err(CoreError::SlotVariance(format!(
                "{:?} vs {:?}",
                self.slots, other.slots
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        let comps = self.comps.par_iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Ok(Tensor {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps,
        })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        let comps = self.comps.par_iter().zip(&other.comps).map(|(a, b)| a - b).collect();
        Ok(Tensor {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps,
        })
    }

    pub fn scale(&self, k: &Expr) -> Tensor {
        Tensor {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.par_iter().map(|e| e * k).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr + Sync + Send) -> Tensor {
        Tensor {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.par_iter().map(f).collect(),
        }
    }

    pub fn try_map<E: Send>(&self, f: impl Fn(&Expr) -> std::result::Result<Expr, E> + Sync + Send) -> std::result::Result<Tensor, E> {
        Ok(Tensor {
            chart: self.chart.clone(),
            slots: self.slots.clone(),
            comps: self.comps.par_iter().map(f).collect::<std::result::Result<_, E>>()?,
        })
    }

    /// Exact component-wise equality.
    pub fn equals(&self, other: &Tensor) -> Result<bool> {
        self.sub(other)?.is_zero()
    }

    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor> {
        if *self.chart != *other.chart {
            return Err(CoreError::ChartMismatch);
        }
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let r = self.rank();
        Ok(Tensor::from_fn(self.chart.clone(), slots, |i| {
            let a = self.get(&i[..r]);
            if a.is_zero() {
                return Expr::zero();
            }
            a * other.get(&i[r..])
        }))
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.rank() {
            Err(CoreError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    /// Trace over an upper and a lower slot.
    pub fn contract(&self, i: usize, j: usize) -> Result<Tensor> {
        self.check_slot(i)?;
        self.check_slot(j)?;
        if i == j || self.slots[i] == self.slots[j] {
            return Err(CoreError::SlotVariance(format!(
                "cannot contract slots {i} and {j} of {:?}",
                self.slots
            )));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let slots: Vec<Variance> = self
            .slots
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != lo && k != hi)
            .map(|(_, v)| *v)
            .collect();
        let n = self.dim();
        Ok(Tensor::from_fn(self.chart.clone(), slots, |rest| {
            let mut full = Vec::with_capacity(rest.len() + 2);
            full.extend_from_slice(&rest[..lo]);
            full.push(0);
            full.extend_from_slice(&rest[lo..hi - 1]);
            full.push(0);
            full.extend_from_slice(&rest[hi - 1..]);
            sum_exprs((0..n).map(|m| {
                full[lo] = m;
                full[hi] = m;
                self.get(&full).clone()
            }))
        }))
    }

    fn move_slot_with(&self, slot: usize, target: Variance, m: &(dyn Fn(usize, usize) -> Expr + Sync)) -> Result<Tensor> {
        self.check_slot(slot)?;
        if self.slots[slot] == target {
            return Err(CoreError::SlotVariance(format!(
                "slot {slot} is already {target:?}"
            )));
        }
        let n = self.dim();
        let mut slots = self.slots.clone();
        slots[slot] = target;
        Ok(Tensor::from_fn(self.chart.clone(), slots, |idx| {
            let mut j = idx.to_vec();
            let a = idx[slot];
            sum_exprs((0..n).filter_map(|b| {
                let gab = m(a, b);
                if gab.is_zero() {
                    return None;
                }
                j[slot] = b;
                let t = self.get(&j);
                if t.is_zero() {
                    None
                } else {
                    Some(&gab * t)
                }
            }))
        }))
    }

    pub fn raise_index(&self, slot: usize, g: &Metric) -> Result<Tensor> {
        self.move_slot_with(slot, Variance::Up, &|a, b| g.inv(a, b).clone())
    }

    pub fn lower_index(&self, slot: usize, g: &Metric) -> Result<Tensor> {
        self.move_slot_with(slot, Variance::Down, &|a, b| g.g(a, b).clone())
    }

    /// Changes every slot to the requested variance.
    pub fn with_variance(&self, target: &[Variance], g: &Metric) -> Result<Tensor> {
        if target.len() != self.rank() {
            return Err(CoreError::SlotVariance(format!(
                "rank {} tensor cannot take pattern {target:?}",
                self.rank()
            )));
        }
        let mut t = self.clone();
        for (k, v) in target.iter().enumerate() {
            if t.slots[k] != *v {
                t = match v {
                    Variance::Up => t.raise_index(k, g)?,
                    Variance::Down => t.lower_index(k, g)?,
                };
            }
        }
        Ok(t)
    }

    /// Reorders slots: slot k of the result is slot `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return Err(CoreError::SlotOutOfRange { slot: r, rank: r });
        }
        let slots = perm.iter().map(|&p| self.slots[p]).collect();
        Ok(Tensor::from_fn(self.chart.clone(), slots, |idx| {
            let mut src = vec![0; r];
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            self.get(&src).clone()
        }))
    }

    fn symmetrize_impl(&self, slots: &[usize], alternating: bool) -> Result<Tensor> {
        for &s in slots {
            self.check_slot(s)?;
        }
        for (i, &s) in slots.iter().enumerate() {
            if slots[..i].contains(&s) {
                return Err(CoreError::SlotVariance(format!("slot {s} listed twice")));
            }
            if self.slots[s] != self.slots[slots[0]] {
                return Err(CoreError::SlotVariance(format!(
                    "slots {slots:?} mix variances"
                )));
            }
        }
        let perms = permutations(slots.len());
        let norm = Expr::rational(1, perms.len() as i64);
        Ok(Tensor::from_fn(self.chart.clone(), self.slots.clone(), |idx| {
            let mut src = idx.to_vec();
            let mut terms = Vec::with_capacity(perms.len());
            for (p, sign) in &perms {
                for (k, &s) in slots.iter().enumerate() {
                    src[s] = idx[slots[p[k]]];
                }
                let v = self.get(&src);
                if v.is_zero() {
                    continue;
                }
                terms.push(if alternating && *sign < 0 { -v } else { v.clone() });
            }
            &sum_exprs(terms) * &norm
        }))
    }

    /// Symmetrization with 1/k! normalization.
    pub fn symmetrize(&self, slots: &[usize]) -> Result<Tensor> {
        self.symmetrize_impl(slots, false)
    }

    /// Antisymmetrization with 1/k! normalization.
    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<Tensor> {
        self.symmetrize_impl(slots, true)
    }
}

/// All permutations of 0..k with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect()
}

/// Sign of a sequence viewed as a permutation; 0 if an entry repeats.
pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] == p[j] {
                return 0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Fully covariant Levi-Civita tensor ε_{a1...an} = sqrt|det g| sgn(a).
pub fn levi_civita(g: &Metric) -> Tensor {
    let vol = curvscan_symbolic::Expr::sqrt(&g.abs_det());
    let n = g.dim();
    Tensor::from_fn(g.chart().clone(), vec![Variance::Down; n], |idx| {
        match permutation_sign(idx) {
            0 => Expr::zero(),
            1 => vol.clone(),
            _ => -&vol,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Signature;

    fn minkowski() -> Metric {
        let c = Chart::new(&["t", "x", "y", "z"]).unwrap();
        Metric::diagonal(
            c,
            vec![Expr::int(-1), Expr::one(), Expr::one(), Expr::one()],
            Signature::lorentzian(4),
        )
        .unwrap()
    }

    #[test]
    fn trace_of_delta() {
        let g = minkowski();
        let d = Tensor::delta(g.chart().clone());
        assert_eq!(d.contract(0, 1).unwrap().as_scalar().unwrap(), &Expr::int(4));
    }

    #[test]
    fn contraction_requires_opposite_variance() {
        let g = minkowski();
        let t = Tensor::metric(&g);
        assert!(matches!(t.contract(0, 1), Err(CoreError::SlotVariance(_))));
        assert!(matches!(t.contract(0, 2), Err(CoreError::SlotOutOfRange { .. })));
    }

    #[test]
    fn epsilon_full_contraction() {
        let g = minkowski();
        let e = levi_civita(&g);
        assert_eq!(e.get(&[0, 1, 2, 3]), &Expr::one());
        assert!(e.get(&[0, 0, 2, 3]).is_zero());
        let up = e.with_variance(&[Variance::Up; 4], &g).unwrap();
        let s: Expr = e.components().iter().zip(up.components()).map(|(a, b)| a * b).sum();
        assert_eq!(s, Expr::int(-24));
    }

    #[test]
    fn antisymmetrizing_symmetric_slots_vanishes() {
        let g = minkowski();
        let c = g.chart().clone();
        let t = Tensor::from_fn(c, vec![Variance::Down; 3], |i| {
            Expr::symbol(&format!("s{}{}", i[0].min(i[1]), i[0].max(i[1]))) * Expr::symbol(&format!("w{}", i[2]))
        });
        assert!(t.antisymmetrize(&[0, 1, 2]).unwrap().is_zero().unwrap());
        assert!(!t.symmetrize(&[0, 1, 2]).unwrap().is_zero().unwrap());
    }
}
