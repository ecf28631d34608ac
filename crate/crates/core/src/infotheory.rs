//! Shannon entropy and pairwise mutual information of 8-bit channels, in bits.

use crate::error::{Error, Result};
use crate::imagecore::GrayImage;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram256 {
    bins: [u64; 256],
    total: u64,
}

impl Histogram256 {
    pub fn of(img: &GrayImage) -> Self {
        let mut bins = [0u64; 256];
        for &v in img.data() {
            bins[usize::from(v)] += 1;
        }
        Self {
            bins,
            total: img.len() as u64,
        }
    }

    pub fn bins(&self) -> &[u64; 256] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_counts(self.bins.iter().copied(), self.total)
    }
}

/// 256x256 joint counts of co-located samples from two images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointHistogram {
    bins: Vec<u64>,
    total: u64,
}

impl JointHistogram {
    pub fn of(a: &GrayImage, b: &GrayImage) -> Result<Self> {
        check_pair(a, b)?;
        let mut bins = vec![0u64; 256 * 256];
        for (&x, &y) in a.data().iter().zip(b.data()) {
            bins[usize::from(x) * 256 + usize::from(y)] += 1;
        }
        Ok(Self {
            bins,
            total: a.len() as u64,
        })
    }

    #[inline]
    pub fn get(&self, a: u8, b: u8) -> u64 {
        self.bins[usize::from(a) * 256 + usize::from(b)]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn marginal_a(&self) -> Histogram256 {
        let mut bins = [0u64; 256];
        for (i, row) in self.bins.chunks_exact(256).enumerate() {
            bins[i] = row.iter().sum();
        }
        Histogram256 { bins, total: self.total }
    }

    pub fn marginal_b(&self) -> Histogram256 {
        let mut bins = [0u64; 256];
        for row in self.bins.chunks_exact(256) {
            for (acc, &c) in bins.iter_mut().zip(row) {
                *acc += c;
            }
        }
        Histogram256 { bins, total: self.total }
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_counts(self.bins.iter().copied(), self.total)
    }
}

fn entropy_of_counts(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let h = -counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>();
    h.max(0.0)
}

fn check_pair(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyImage);
    }
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Entropy of the 256-bin histogram, in `[0, 8]` bits.
pub fn entropy(img: &GrayImage) -> Result<f64> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    Ok(Histogram256::of(img).entropy())
}

/// `I(A;B) = H(A) + H(B) - H(A,B)`, clamped at zero.
pub fn mutual_information(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    let joint = JointHistogram::of(a, b)?;
    Ok(mi_from_joint(&joint))
}

fn mi_from_joint(joint: &JointHistogram) -> f64 {
    let ha = joint.marginal_a().entropy();
    let hb = joint.marginal_b().entropy();
    (ha + hb - joint.entropy()).max(0.0)
}

/// `[H(R), H(G), H(B), I(R;G), I(R;B), I(G;B)]`.
pub fn info_block(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<[f64; 6]> {
    check_pair(r, g)?;
    check_pair(r, b)?;
    Ok([
        entropy(r)?,
        entropy(g)?,
        entropy(b)?,
        mutual_information(r, g)?,
        mutual_information(r, b)?,
        mutual_information(g, b)?,
    ])
}

pub const INFO_NAMES: [&str; 6] = ["H_R", "H_G", "H_B", "MI_RG", "MI_RB", "MI_GB"];
