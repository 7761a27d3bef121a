use num_traits::{One, Zero};
use rand::Rng;

use super::small::Small;
use super::{int, q, CRealError, RealFn, Q};

/// Where a uniform partition places its tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Left,
    Mid,
    Right,
}

/// A tagged partition `0 = x_0 < ... < x_M = 1` with `x_i <= t_i <= x_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub points: Vec<Q>,
    pub tags: Vec<Q>,
}

impl Partition {
    pub fn new(points: Vec<Q>, tags: Vec<Q>) -> Result<Partition, CRealError> {
        let bad = |m: &str| Err(CRealError::InvalidPartition(m.to_string()));
        if points.len() < 2 {
            return bad("needs at least two points");
        }
        if !points[0].is_zero() || !points[points.len() - 1].is_one() {
            return bad("must start at 0 and end at 1");
        }
        if tags.len() != points.len() - 1 {
            return bad("needs one tag per interval");
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0] >= w[1] {
                return bad("points must increase strictly");
            }
            if tags[i] < w[0] || tags[i] > w[1] {
                return bad("tag outside its interval");
            }
        }
        Ok(Partition { points, tags })
    }

    pub fn intervals(&self) -> usize {
        self.tags.len()
    }

    /// `max_i (x_{i+1} - x_i)`
    pub fn mesh(&self) -> Q {
        self.points.windows(2).map(|w| &w[1] - &w[0]).max().unwrap_or_else(Q::zero)
    }

    pub fn uniform(m: usize, tag: Tag) -> Partition {
        let m = m.max(1);
        let points: Vec<Q> = (0..=m).map(|i| q(i as i64, m as i64)).collect();
        let tags = points
            .windows(2)
            .map(|w| match tag {
                Tag::Left => w[0].clone(),
                Tag::Right => w[1].clone(),
                Tag::Mid => (&w[0] + &w[1]) / int(2),
            })
            .collect();
        Partition { points, tags }
    }

    /// A random partition with mesh at most `max_mesh`.
    pub fn random<R: Rng>(rng: &mut R, max_mesh: &Q) -> Partition {
        let m = (int(2) / max_mesh).ceil().to_integer();
        let m: i64 = m.try_into().unwrap_or(i64::MAX / 4).max(1);
        let den = 4 * m;
        let mut nums = vec![0i64];
        for i in 1..m {
            nums.push(4 * i + rng.gen_range(-1..=1));
        }
        nums.push(den);
        let points = nums.iter().map(|&n| q(n, den)).collect();
        let tags = nums
            .windows(2)
            .map(|w| q(8 * w[0] + (w[1] - w[0]) * rng.gen_range(0..=8), 8 * den))
            .collect();
        Partition { points, tags }
    }
}

/// `sum_i f(t_i) (x_{i+1} - x_i)`, exact.
pub fn riemann_sum(f: &RealFn, p: &Partition) -> Q {
    small_sum(f, p).unwrap_or_else(|| big_sum(f, p))
}

fn small_sum(f: &RealFn, p: &Partition) -> Option<Q> {
    let mut acc = Small::new(0, 1)?;
    let mut left = Small::from_q(&p.points[0])?;
    for (right, t) in p.points[1..].iter().zip(&p.tags) {
        let right = Small::from_q(right)?;
        let term = f.eval_small(Small::from_q(t)?)?.mul(right.sub(left)?)?;
        acc = acc.add(term)?;
        left = right;
    }
    Some(acc.to_q())
}

fn big_sum(f: &RealFn, p: &Partition) -> Q {
    p.points
        .windows(2)
        .zip(&p.tags)
        .map(|(w, t)| f.eval(t) * (&w[1] - &w[0]))
        .fold(Q::zero(), |a, b| a + b)
}
