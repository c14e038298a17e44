use super::label::LinguisticLabel;
use super::rules::RuleTable;
use super::variable::FuzzyVariable;
use super::FuzzyError;

pub const DEFAULT_RESOLUTION: usize = 201;
pub const MIN_RESOLUTION: usize = 51;

/// Mamdani controller over deviation `e` and deviation rate `de` producing a
/// steering-wheel angle `u`. Immutable once built.
#[derive(Debug, Clone)]
pub struct MamdaniController {
    e: FuzzyVariable,
    de: FuzzyVariable,
    u: FuzzyVariable,
    rules: RuleTable,
    /// Normalized output sample abscissae, symmetric about an exact zero.
    samples: Vec<f64>,
    /// `consequents[k][i]` = membership of `samples[i]` in output label `k`.
    consequents: [Vec<f64>; 7],
}

impl MamdaniController {
    pub fn new(
        e: FuzzyVariable,
        de: FuzzyVariable,
        u: FuzzyVariable,
        rules: RuleTable,
        resolution: usize,
    ) -> Result<Self, FuzzyError> {
        if resolution < MIN_RESOLUTION || resolution.is_multiple_of(2) {
            return Err(FuzzyError::InvalidController(format!(
                "resolution must be odd and at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        for v in [&e, &de, &u] {
            v.validate()?;
        }
        rules.validate()?;
        let mid = (resolution / 2) as f64;
        let samples: Vec<f64> = (0..resolution).map(|i| (i as f64 - mid) / mid).collect();
        let consequents = u
            .sets
            .map(|s| samples.iter().map(|&x| s.eval(x)).collect::<Vec<_>>());
        // A fired rule must leave mass on the output grid.
        for (k, c) in consequents.iter().enumerate() {
            if c.iter().all(|&m| m == 0.0) {
                return Err(FuzzyError::InvalidController(format!(
                    "output set {} has no mass at resolution {resolution}",
                    LinguisticLabel::ALL[k]
                )));
            }
        }
        Ok(MamdaniController {
            e,
            de,
            u,
            rules,
            samples,
            consequents,
        })
    }

    /// Default layouts and rule table with the given physical universe edges.
    pub fn with_gains(e_max: f64, de_max: f64, u_max: f64) -> Result<Self, FuzzyError> {
        Self::new(
            FuzzyVariable::deviation(e_max),
            FuzzyVariable::deviation_rate(de_max),
            FuzzyVariable::steering(u_max),
            RuleTable::default(),
            DEFAULT_RESOLUTION,
        )
    }

    pub fn e_var(&self) -> &FuzzyVariable {
        &self.e
    }

    pub fn de_var(&self) -> &FuzzyVariable {
        &self.de
    }

    pub fn u_var(&self) -> &FuzzyVariable {
        &self.u
    }

    pub fn rules(&self) -> &RuleTable {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn u_max(&self) -> f64 {
        self.u.gain
    }

    /// Firing strength per output label: max over the rules naming that label
    /// of `min(deg_e[i], deg_de[j])`.
    pub fn strengths(&self, deg_e: &[f64; 7], deg_de: &[f64; 7]) -> [f64; 7] {
        let mut strength = [0.0f64; 7];
        for (i, row) in self.rules.rows().iter().enumerate() {
            if deg_e[i] == 0.0 {
                continue;
            }
            for (j, out) in row.iter().enumerate() {
                let w = deg_e[i].min(deg_de[j]);
                let k = out.index();
                if w > strength[k] {
                    strength[k] = w;
                }
            }
        }
        strength
    }

    /// Aggregated output curve sampled over the normalized `u` universe.
    ///
    /// Equal to the max over all 49 rules of the rule strength clipping the
    /// consequent, since `min` distributes over the per-label maximum.
    pub fn infer(&self, deg_e: &[f64; 7], deg_de: &[f64; 7]) -> Vec<f64> {
        let strength = self.strengths(deg_e, deg_de);
        let mut curve = vec![0.0f64; self.samples.len()];
        for (k, &w) in strength.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (c, &m) in curve.iter_mut().zip(&self.consequents[k]) {
                let v = w.min(m);
                if v > *c {
                    *c = v;
                }
            }
        }
        curve
    }

    /// Centroid of a sampled curve, in physical `u` units.
    pub fn defuzz_centroid(&self, curve: &[f64]) -> Result<f64, FuzzyError> {
        if curve.len() != self.samples.len() {
            return Err(FuzzyError::InvalidController(format!(
                "curve has {} samples, expected {}",
                curve.len(),
                self.samples.len()
            )));
        }
        // Samples pair up as +x / -x around the middle one, so a symmetric
        // curve contributes exactly zero moment.
        let n = curve.len();
        let mid = n / 2;
        let mut num = 0.0;
        for i in 0..mid {
            num += self.samples[n - 1 - i] * (curve[n - 1 - i] - curve[i]);
        }
        let den: f64 = curve.iter().sum();
        if den <= 0.0 {
            return Err(FuzzyError::EmptyAggregate);
        }
        Ok(num / den * self.u.gain)
    }

    /// Crisp steering-wheel angle for physical inputs; out-of-universe inputs
    /// are clamped to the edge.
    pub fn eval(&self, e: f64, de: f64) -> f64 {
        let curve = self.infer(&self.e.fuzzify(e), &self.de.fuzzify(de));
        // Coverage >= 0.4 on both inputs fires some rule, and every consequent
        // has mass on the grid (checked in `new`).
        self.defuzz_centroid(&curve)
            .expect("validated controller always fires a rule")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::MembershipFunction;
    use proptest::prelude::*;

    fn one_hot(l: LinguisticLabel) -> [f64; 7] {
        let mut d = [0.0; 7];
        d[l.index()] = 1.0;
        d
    }

    fn ctrl() -> MamdaniController {
        MamdaniController::with_gains(0.2, 0.5, 180.0).unwrap()
    }

    /// Literal transcription of max-min inference over all 49 rules.
    fn brute_force(c: &MamdaniController, deg_e: &[f64; 7], deg_de: &[f64; 7]) -> Vec<f64> {
        c.samples
            .iter()
            .map(|&x| {
                let mut best = 0.0f64;
                for a in LinguisticLabel::ALL {
                    for b in LinguisticLabel::ALL {
                        let out = c.u.set(c.rules.get(a, b)).eval(x);
                        best = best.max(deg_e[a.index()].min(deg_de[b.index()]).min(out));
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn zo_zo_yields_zo_set() {
        let c = ctrl();
        let z = one_hot(LinguisticLabel::ZO);
        let curve = c.infer(&z, &z);
        for (x, m) in c.samples.iter().zip(&curve) {
            assert_eq!(*m, c.u.set(LinguisticLabel::ZO).eval(*x));
        }
    }

    #[test]
    fn one_hot_pairs_follow_table() {
        let c = ctrl();
        for a in LinguisticLabel::ALL {
            for b in LinguisticLabel::ALL {
                let curve = c.infer(&one_hot(a), &one_hot(b));
                let set = c.u.set(c.rules.get(a, b));
                for (x, m) in c.samples.iter().zip(&curve) {
                    assert_eq!(*m, set.eval(*x), "({a}, {b})");
                }
            }
        }
    }

    #[test]
    fn mixed_degrees_match_four_clipped_sets() {
        let c = ctrl();
        let mut d = [0.0; 7];
        d[LinguisticLabel::ZO.index()] = 0.7;
        d[LinguisticLabel::PS.index()] = 0.3;
        // (ZO,ZO)->ZO @0.7, (ZO,PS)->PS @0.3, (PS,ZO)->PS @0.3, (PS,PS)->PS @0.3
        let zo = c.u.set(LinguisticLabel::ZO);
        let ps = c.u.set(LinguisticLabel::PS);
        let curve = c.infer(&d, &d);
        for (x, m) in c.samples.iter().zip(&curve) {
            let expect = zo.eval(*x).min(0.7).max(ps.eval(*x).min(0.3));
            assert_eq!(*m, expect);
        }
    }

    #[test]
    fn mirrored_inputs_mirror_the_curve() {
        let c = ctrl();
        let nb = one_hot(LinguisticLabel::NB);
        let pb = one_hot(LinguisticLabel::PB);
        let lo = c.infer(&nb, &nb);
        let mut hi = c.infer(&pb, &pb);
        hi.reverse();
        assert_eq!(lo, hi);
    }

    #[test]
    fn centroid_cases() {
        let c = ctrl();
        let n = c.resolution();
        assert_eq!(c.defuzz_centroid(&vec![1.0; n]).unwrap(), 0.0);
        assert_eq!(
            c.defuzz_centroid(&vec![0.0; n]),
            Err(FuzzyError::EmptyAggregate)
        );
        let zo: Vec<f64> = c
            .samples
            .iter()
            .map(|&x| c.u.set(LinguisticLabel::ZO).eval(x))
            .collect();
        assert_eq!(c.defuzz_centroid(&zo).unwrap(), 0.0);
        assert!(c.defuzz_centroid(&[1.0]).is_err());
    }

    /// Closed-form centroid of the PB shoulder on [-1, 1]: flat part is a
    /// point at 1, the left tail a half gaussian of width sigma.
    fn pb_centroid_continuous(sigma: f64, center: f64) -> f64 {
        // integral of exp(-(x-c)^2/2s^2) and x*exp(..) on [-1, c] via erf-free
        // numerical quadrature at a much finer step than the controller uses.
        let n = 2_000_000;
        let h = (center + 1.0) / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..=n {
            let x = -1.0 + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            let m = (-(x - center).powi(2) / (2.0 * sigma * sigma)).exp();
            num += w * x * m;
            den += w * m;
        }
        num / den
    }

    #[test]
    fn pb_set_centroid_matches_closed_form() {
        let c = ctrl();
        let pb = *c.u.set(LinguisticLabel::PB);
        let MembershipFunction::Shoulder { center, sigma, .. } = pb else {
            panic!("PB is a shoulder");
        };
        let curve: Vec<f64> = c.samples.iter().map(|&x| pb.eval(x)).collect();
        let got = c.defuzz_centroid(&curve).unwrap();
        let cont = pb_centroid_continuous(sigma, center) * 180.0;
        // Rectangle-rule sum vs integral: O(h) gap from the full-weight edge sample.
        assert!((got - cont).abs() < 1.0, "{got} vs {cont}");
    }

    #[test]
    fn corner_output_is_dominated_by_pb() {
        let c = ctrl();
        let (de_, dde) = (c.e.fuzzify(0.2), c.de.fuzzify(0.5));
        let oracle = brute_force(&c, &de_, &dde);
        let (mut num, mut den) = (0.0, 0.0);
        for (x, m) in c.samples.iter().zip(&oracle) {
            num += x * m;
            den += m;
        }
        let got = c.eval(0.2, 0.5);
        assert!((got - num / den * 180.0).abs() < 1e-9);
        // PM's gaussian tail still fires weakly at the edge, pulling the
        // centroid below that of PB alone.
        let MembershipFunction::Shoulder { center, sigma, .. } = *c.u.set(LinguisticLabel::PB)
        else {
            panic!("PB is a shoulder");
        };
        let pb_only = pb_centroid_continuous(sigma, center) * 180.0;
        assert!(got < pb_only && got > pb_only - 10.0, "{got} vs {pb_only}");
    }

    #[test]
    fn zero_fixed_point_and_bounds() {
        let c = ctrl();
        assert_eq!(c.eval(0.0, 0.0), 0.0);
        for (e, de) in [(5.0, 5.0), (-5.0, -5.0), (5.0, -5.0)] {
            assert!(c.eval(e, de).abs() <= c.u_max());
        }
    }

    #[test]
    fn rejects_bad_resolution() {
        let make = |r| {
            MamdaniController::new(
                FuzzyVariable::deviation(1.0),
                FuzzyVariable::deviation_rate(1.0),
                FuzzyVariable::steering(120.0),
                RuleTable::default(),
                r,
            )
        };
        assert!(make(50).is_err());
        assert!(make(202).is_err());
        assert!(make(49).is_err());
        assert!(make(51).is_ok());
    }

    proptest! {
        #[test]
        fn fast_inference_matches_brute_force(e in -0.3f64..0.3, de in -0.7f64..0.7) {
            let c = ctrl();
            let (de_, dde) = (c.e.fuzzify(e), c.de.fuzzify(de));
            prop_assert_eq!(c.infer(&de_, &dde), brute_force(&c, &de_, &dde));
        }

        #[test]
        fn odd_and_bounded(e in -1.0f64..1.0, de in -2.0f64..2.0) {
            let c = ctrl();
            let a = c.eval(e, de);
            let b = c.eval(-e, -de);
            prop_assert!((a + b).abs() <= 1e-9 * c.u_max());
            prop_assert!(a.abs() <= c.u_max());
        }
    }
}
