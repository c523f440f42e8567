//! The built-in discretizers.

use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

use super::{BoundaryChain, Discretizer, Fit, Setting};
use crate::error::{Error, Result};

fn require_k(setting: &Setting, method: &str) -> Result<usize> {
    match setting {
        Setting::Intervals(0) => Err(Error::Parameter(format!("{method}: k must be at least 1"))),
        Setting::Intervals(k) => Ok(*k),
        Setting::Boundaries(_) => Err(Error::Parameter(format!(
            "{method} takes an interval count, not a boundary list"
        ))),
    }
}

fn require_values(values: &[f64], method: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Domain(format!("{method}: no values to fit")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("{method}: values must be finite")));
    }
    Ok(())
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Boundaries `min + i * (max - min) / k`.
#[derive(Debug, Default, Clone, Copy)]
pub struct EqualWidth;

/// Equal Width boundaries. Each point is evaluated exactly and rounded once.
pub fn equal_width_boundaries(values: &[f64], k: usize) -> Result<Fit> {
    if k == 0 {
        return Err(Error::Parameter("equal_width: k must be at least 1".into()));
    }
    require_values(values, "equal_width")?;
    let (min, max) = min_max(values);
    if min == max {
        return Ok(Fit {
            chain: BoundaryChain::degenerate(min)?,
            warnings: vec![format!("constant column ({min}); using the single interval [{min}, {min}]")],
        });
    }
    let lo = BigRational::from_f64(min).expect("finite");
    let hi = BigRational::from_f64(max).expect("finite");
    let width = (&hi - &lo) / BigRational::from_usize(k).expect("k fits");
    let mut boundaries = Vec::with_capacity(k + 1);
    boundaries.push(min);
    for i in 1..k {
        let b = &lo + &width * BigRational::from_usize(i).expect("i fits");
        boundaries.push(b.to_f64().expect("between two finite values"));
    }
    boundaries.push(max);
    let mut warnings = Vec::new();
    let before = boundaries.len();
    boundaries.dedup();
    if boundaries.len() != before {
        warnings.push(format!(
            "range [{min}, {max}] too narrow for {k} distinct f64 boundaries; merged to {} intervals",
            boundaries.len() - 1
        ));
    }
    Ok(Fit {
        chain: BoundaryChain::new(boundaries)?,
        warnings,
    })
}

impl Discretizer for EqualWidth {
    fn name(&self) -> &'static str {
        "equal_width"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["width", "ew"]
    }

    fn fit(&self, values: &[f64], setting: &Setting) -> Result<Fit> {
        equal_width_boundaries(values, require_k(setting, self.name())?)
    }
}

/// Intervals holding (nearly) the same number of sorted values.
///
/// Cut `i` sits after 1-based position `ceil(i * n / k)`, moved right past any
/// run of equal values; the boundary is the midpoint of the values on either
/// side of the cut.
#[derive(Debug, Default, Clone, Copy)]
pub struct EqualFrequency;

pub fn equal_frequency_boundaries(values: &[f64], k: usize) -> Result<Fit> {
    if k == 0 {
        return Err(Error::Parameter("equal_frequency: k must be at least 1".into()));
    }
    require_values(values, "equal_frequency")?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let (min, max) = (sorted[0], sorted[n - 1]);
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();

    let mut warnings = Vec::new();
    if min == max {
        warnings.push(format!("constant column ({min}); using the single interval [{min}, {min}]"));
        return Ok(Fit {
            chain: BoundaryChain::degenerate(min)?,
            warnings,
        });
    }
    let k_used = if distinct < k {
        warnings.push(format!("k = {k} exceeds the {distinct} distinct values; clamped to {distinct}"));
        distinct
    } else {
        k
    };

    let mut boundaries = vec![min];
    let mut last_cut = 0;
    for i in 1..k_used {
        // 1-based position of the last value left of the cut.
        let mut pos = (i * n).div_ceil(k_used);
        while pos < n && sorted[pos - 1] == sorted[pos] {
            pos += 1;
        }
        if pos >= n || pos <= last_cut {
            continue;
        }
        last_cut = pos;
        let (a, b) = (sorted[pos - 1], sorted[pos]);
        boundaries.push(a / 2.0 + b / 2.0);
    }
    boundaries.push(max);
    boundaries.dedup();
    if boundaries.len() - 1 < k_used {
        warnings.push(format!(
            "runs of repeated values merged cuts; {} intervals instead of {k_used}",
            boundaries.len() - 1
        ));
    }
    Ok(Fit {
        chain: BoundaryChain::new(boundaries)?,
        warnings,
    })
}

impl Discretizer for EqualFrequency {
    fn name(&self) -> &'static str {
        "equal_frequency"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["frequency", "ef"]
    }

    fn fit(&self, values: &[f64], setting: &Setting) -> Result<Fit> {
        equal_frequency_boundaries(values, require_k(setting, self.name())?)
    }
}

/// A user-supplied boundary list, used as is.
#[derive(Debug, Default, Clone, Copy)]
pub struct Manual;

impl Discretizer for Manual {
    fn name(&self) -> &'static str {
        "manual"
    }

    fn fit(&self, values: &[f64], setting: &Setting) -> Result<Fit> {
        let Setting::Boundaries(b) = setting else {
            return Err(Error::Parameter("manual takes a boundary list".into()));
        };
        let chain = BoundaryChain::new(b.clone())?;
        if let Some(v) = values.iter().find(|v| chain.locate(**v).is_err()) {
            return Err(Error::OutOfRange {
                value: *v,
                lo: chain.lo(),
                hi: chain.hi(),
            });
        }
        Ok(Fit {
            chain,
            warnings: Vec::new(),
        })
    }
}
