use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// FIR filter with taps on `offset, offset + 1, ..., offset + len - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub taps: Vec<f64>,
    pub offset: isize,
}

impl Filter {
    pub fn new(taps: Vec<f64>, offset: isize) -> Self {
        Self { taps, offset }
    }

    /// Highpass partner `g[i] = (-1)^i h[1 - i]` of a lowpass `h`.
    pub fn alternating_flip(&self) -> Filter {
        let len = self.taps.len() as isize;
        let offset = 1 - (self.offset + len - 1);
        let taps = (0..len)
            .map(|t| {
                let i = offset + t;
                let sign = if i.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                sign * self.taps[(1 - i - self.offset) as usize]
            })
            .collect();
        Filter { taps, offset }
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

/// Analysis and synthesis filters of a periodic two-channel filter bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletFilterPair {
    pub name: String,
    pub analysis_lowpass: Filter,
    pub analysis_highpass: Filter,
    pub synthesis_lowpass: Filter,
    pub synthesis_highpass: Filter,
    pub vanishing_moments: u32,
}

impl WaveletFilterPair {
    /// Builds the pair from the two lowpass filters via alternating flips.
    pub fn biorthogonal(
        name: &str,
        analysis_lowpass: Filter,
        synthesis_lowpass: Filter,
        vanishing_moments: u32,
    ) -> Self {
        let analysis_highpass = synthesis_lowpass.alternating_flip();
        let synthesis_highpass = analysis_lowpass.alternating_flip();
        Self {
            name: name.to_string(),
            analysis_lowpass,
            analysis_highpass,
            synthesis_lowpass,
            synthesis_highpass,
            vanishing_moments,
        }
    }

    pub fn orthonormal(name: &str, lowpass: Filter, vanishing_moments: u32) -> Self {
        Self::biorthogonal(name, lowpass.clone(), lowpass, vanishing_moments)
    }

    pub fn is_orthonormal(&self) -> bool {
        self.analysis_lowpass == self.synthesis_lowpass
    }

    /// Longest filter length in the bank.
    pub fn support(&self) -> usize {
        [
            &self.analysis_lowpass,
            &self.analysis_highpass,
            &self.synthesis_lowpass,
            &self.synthesis_highpass,
        ]
        .iter()
        .map(|f| f.len())
        .max()
        .unwrap_or(0)
    }

    pub fn haar() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::orthonormal("haar", Filter::new(vec![s, s], 0), 1)
    }

    pub fn daubechies4() -> Self {
        let r3 = 3.0_f64.sqrt();
        let d = 4.0 * std::f64::consts::SQRT_2;
        let taps = vec![
            (1.0 + r3) / d,
            (3.0 + r3) / d,
            (3.0 - r3) / d,
            (1.0 - r3) / d,
        ];
        Self::orthonormal("d4", Filter::new(taps, 0), 2)
    }

    /// Cohen–Daubechies–Feauveau 9/7 biorthogonal pair; the 9-tap filter
    /// analyzes, the 7-tap filter synthesizes.
    #[allow(clippy::excessive_precision)]
    pub fn cdf97() -> Self {
        let a = [
            0.037_828_455_506_995_46,
            -0.023_849_465_019_380_00,
            -0.110_624_404_418_423_41,
            0.377_402_855_612_653_76,
            0.852_698_679_009_403_4,
        ];
        let s = [
            -0.064_538_882_628_938_44,
            -0.040_689_417_609_558_44,
            0.418_092_273_222_212_2,
            0.788_485_616_405_664_4,
        ];
        let analysis = symmetric(&a);
        let synthesis = symmetric(&s);
        Self::biorthogonal(
            "cdf97",
            Filter::new(analysis, -4),
            Filter::new(synthesis, -3),
            4,
        )
    }

    /// Looks up a shipped filter bank by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Self::haar()),
            "d4" | "db2" | "daubechies4" => Ok(Self::daubechies4()),
            "cdf97" | "cdf9/7" | "bior4.4" => Ok(Self::cdf97()),
            other => Err(invalid(
                "filters",
                format!("unknown wavelet `{other}` (expected haar, d4 or cdf97)"),
            )),
        }
    }
}

/// Mirrors a half filter `[h_0, ..., h_c]` around its last entry.
fn symmetric(half: &[f64]) -> Vec<f64> {
    let mut taps = half.to_vec();
    taps.extend(half.iter().rev().skip(1));
    taps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tap(f: &Filter, i: isize) -> f64 {
        let t = i - f.offset;
        if t < 0 || t >= f.len() as isize {
            0.0
        } else {
            f.taps[t as usize]
        }
    }

    /// Σ_i h̃[i] h[i + 2k] = δ_k for the lowpass pair and the highpass pair.
    fn assert_biorthogonal(p: &WaveletFilterPair) {
        for k in -6isize..=6 {
            let expected = if k == 0 { 1.0 } else { 0.0 };
            let pairs = [
                (&p.analysis_lowpass, &p.synthesis_lowpass, expected),
                (&p.analysis_highpass, &p.synthesis_highpass, expected),
                (&p.analysis_lowpass, &p.synthesis_highpass, 0.0),
                (&p.analysis_highpass, &p.synthesis_lowpass, 0.0),
            ];
            for (a, s, want) in pairs {
                let v: f64 = (-20..20).map(|i| tap(a, i) * tap(s, i + 2 * k)).sum();
                assert!((v - want).abs() < 1e-12, "{} k={k}: {v}", p.name);
            }
        }
    }

    #[test]
    fn shipped_banks_are_biorthogonal() {
        for p in [
            WaveletFilterPair::haar(),
            WaveletFilterPair::daubechies4(),
            WaveletFilterPair::cdf97(),
        ] {
            let sum: f64 = p.analysis_lowpass.taps.iter().sum();
            assert!((sum - std::f64::consts::SQRT_2).abs() < 1e-12);
            assert_biorthogonal(&p);
        }
    }

    #[test]
    fn highpass_kills_polynomials_up_to_vanishing_moments() {
        for p in [
            WaveletFilterPair::haar(),
            WaveletFilterPair::daubechies4(),
            WaveletFilterPair::cdf97(),
        ] {
            for power in 0..p.vanishing_moments as i32 {
                let f = &p.analysis_highpass;
                let moment: f64 = f
                    .taps
                    .iter()
                    .enumerate()
                    .map(|(t, g)| g * ((f.offset + t as isize) as f64).powi(power))
                    .sum();
                assert!(moment.abs() < 1e-9, "{} moment {power}: {moment}", p.name);
            }
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(WaveletFilterPair::by_name("Haar").unwrap().name, "haar");
        assert!(WaveletFilterPair::by_name("sym8").is_err());
    }
}
