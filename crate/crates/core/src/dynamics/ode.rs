#![allow(clippy::excessive_precision, clippy::too_many_arguments)]

//! Explicit Runge–Kutta integrators over flat complex state slices.
//!
//! `Dop853` is the Dormand–Prince 8(5,3) embedded pair with Hairer's step
//! control; `rk4_fixed` is the classical fourth-order method on a uniform grid
//! and serves as an independent check of the adaptive path.

use crate::error::{Error, Result};
use crate::qla::C64;

/// Counters accumulated over one integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

impl std::ops::AddAssign for OdeStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evals += o.evals;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dop853 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Dop853 {
    const SAFE: f64 = 0.9;
    const FAC1: f64 = 0.333;
    const FAC2: f64 = 6.0;
    const EXPO1: f64 = 1.0 / 8.0;

    /// Integrates `dy/dt = f(t, y)` from `t0` to `t1` in place. `post_step`
    /// runs on every accepted state.
    pub fn integrate<F, P>(&self, mut f: F, t0: f64, t1: f64, y: &mut [C64], mut post_step: P) -> Result<OdeStats>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        P: FnMut(&mut [C64]),
    {
        let n = y.len();
        let mut stats = OdeStats::default();
        if t1 <= t0 || n == 0 {
            return Ok(stats);
        }
        let hmax = self.max_step.min(t1 - t0);
        let z = || vec![C64::new(0.0, 0.0); n];
        let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6) = (z(), z(), z(), z(), z(), z());
        let (mut k7, mut k8, mut k9, mut k10, mut k11, mut k12) = (z(), z(), z(), z(), z(), z());
        let (mut ytmp, mut ynew, mut yy1) = (z(), z(), z());

        let mut t = t0;
        f(t, y, &mut k1);
        stats.evals += 1;
        let mut h = self.initial_step(&mut f, t, y, &k1, hmax, &mut ytmp, &mut k2);
        stats.evals += 1;
        let mut last_rejected = false;
        let mut last = false;

        loop {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::TooManySteps { t, steps: self.max_steps });
            }
            if h.abs() <= 1e-15 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            if t + 1.01 * h >= t1 {
                h = t1 - t;
                last = true;
            }

            macro_rules! stage {
                ($out:ident, $c:expr, [$(($a:expr, $k:ident)),+]) => {{
                    for i in 0..n {
                        ytmp[i] = y[i] + (C64::new(0.0, 0.0) $(+ $k[i] * $a)+) * h;
                    }
                    f(t + $c * h, &ytmp, &mut $out);
                }};
            }
            stage!(k2, C2, [(A21, k1)]);
            stage!(k3, C3, [(A31, k1), (A32, k2)]);
            stage!(k4, C4, [(A41, k1), (A43, k3)]);
            stage!(k5, C5, [(A51, k1), (A53, k3), (A54, k4)]);
            stage!(k6, C6, [(A61, k1), (A64, k4), (A65, k5)]);
            stage!(k7, C7, [(A71, k1), (A74, k4), (A75, k5), (A76, k6)]);
            stage!(k8, C8, [(A81, k1), (A84, k4), (A85, k5), (A86, k6), (A87, k7)]);
            stage!(k9, C9, [(A91, k1), (A94, k4), (A95, k5), (A96, k6), (A97, k7), (A98, k8)]);
            stage!(k10, C10, [(A101, k1), (A104, k4), (A105, k5), (A106, k6), (A107, k7), (A108, k8), (A109, k9)]);
            stage!(
                k11,
                C11,
                [(A111, k1), (A114, k4), (A115, k5), (A116, k6), (A117, k7), (A118, k8), (A119, k9), (A1110, k10)]
            );
            for i in 0..n {
                yy1[i] = y[i]
                    + (k1[i] * A121
                        + k4[i] * A124
                        + k5[i] * A125
                        + k6[i] * A126
                        + k7[i] * A127
                        + k8[i] * A128
                        + k9[i] * A129
                        + k10[i] * A1210
                        + k11[i] * A1211)
                        * h;
            }
            f(t + h, &yy1, &mut k12);
            stats.evals += 11;

            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..n {
                let incr = k1[i] * B1
                    + k6[i] * B6
                    + k7[i] * B7
                    + k8[i] * B8
                    + k9[i] * B9
                    + k10[i] * B10
                    + k11[i] * B11
                    + k12[i] * B12;
                ynew[i] = y[i] + incr * h;
                let sk = self.abs_tol + self.rel_tol * y[i].norm().max(ynew[i].norm());
                let e2 = incr - k1[i] * BHH1 - k9[i] * BHH2 - k12[i] * BHH3;
                err2 += (e2.norm() / sk).powi(2);
                let e1 = k1[i] * ER1
                    + k6[i] * ER6
                    + k7[i] * ER7
                    + k8[i] * ER8
                    + k9[i] * ER9
                    + k10[i] * ER10
                    + k11[i] * ER11
                    + k12[i] * ER12;
                err += (e1.norm() / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();
            if !err.is_finite() {
                return Err(Error::NonFinite(t));
            }

            let fac11 = err.powf(Self::EXPO1);
            let fac = (1.0 / Self::FAC2).max((1.0 / Self::FAC1).min(fac11 / Self::SAFE));
            let mut hnew = h / fac;

            if err <= 1.0 {
                stats.accepted += 1;
                post_step(&mut ynew);
                y.copy_from_slice(&ynew);
                t += h;
                if last {
                    return Ok(stats);
                }
                f(t, y, &mut k1);
                stats.evals += 1;
                hnew = hnew.min(hmax);
                if last_rejected {
                    hnew = hnew.min(h);
                }
                last_rejected = false;
            } else {
                hnew = h / (1.0 / Self::FAC1).min(fac11 / Self::SAFE);
                stats.rejected += 1;
                last_rejected = true;
                last = false;
            }
            h = hnew;
        }
    }

    /// Hairer's starting-step heuristic for an order-8 method.
    fn initial_step<F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[C64],
        f0: &[C64],
        hmax: f64,
        y1: &mut [C64],
        f1: &mut [C64],
    ) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        let sk = |i: usize| self.abs_tol + self.rel_tol * y[i].norm();
        let dnf: f64 = (0..n).map(|i| (f0[i].norm() / sk(i)).powi(2)).sum();
        let dny: f64 = (0..n).map(|i| (y[i].norm() / sk(i)).powi(2)).sum();
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * (dny / dnf).sqrt() };
        h = h.min(hmax);
        for i in 0..n {
            y1[i] = y[i] + f0[i] * h;
        }
        f(t + h, y1, f1);
        let der2 = (0..n).map(|i| ((f1[i] - f0[i]).norm() / sk(i)).powi(2)).sum::<f64>().sqrt() / h;
        let der12 = der2.abs().max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 { (h.abs() * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
        (100.0 * h).min(h1).min(hmax)
    }
}

/// Classical RK4 with `ceil((t1 - t0) / dt)` equal steps.
pub fn rk4_fixed<F, P>(mut f: F, t0: f64, t1: f64, dt: f64, y: &mut [C64], mut post_step: P) -> Result<OdeStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    P: FnMut(&mut [C64]),
{
    let n = y.len();
    let mut stats = OdeStats::default();
    if t1 <= t0 {
        return Ok(stats);
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("fixed step {dt} must be > 0")));
    }
    let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let z = || vec![C64::new(0.0, 0.0); n];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (z(), z(), z(), z(), z());
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        f(t, y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        post_step(y);
        if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite(t + h));
        }
        stats.accepted += 1;
        stats.evals += 4;
    }
    Ok(stats)
}

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;
