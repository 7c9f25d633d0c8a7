//! Dormand–Prince 8(5,3) explicit Runge–Kutta stepper.
//!
//! Twelve stages per step; the local error is estimated from the combined
//! fifth- and third-order embedded solutions and the step size is controlled
//! as in Hairer, Nørsett & Wanner, "Solving Ordinary Differential Equations I".
//! The error norm is taken over 2-vector blocks (a position or a momentum),
//! which keeps the controller invariant under rotations of the plane.

/// Right-hand side `dy/dt = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    type Error;

    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) -> Result<(), Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub safety: f64,
    /// Lower bound on `h_new / h`.
    pub min_factor: f64,
    /// Upper bound on `h_new / h`.
    pub max_factor: f64,
}

impl StepControl {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        StepControl { rel_tol, abs_tol, safety: 0.9, min_factor: 0.333, max_factor: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub evaluations: usize,
    pub accepted: usize,
    pub rejected: usize,
}

/// Outcome of a single attempted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attempt {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone)]
pub struct Dop853<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    /// `f(t, y)` at the current point.
    f0: [f64; N],
    /// Step to try next.
    pub h: f64,
    control: StepControl,
    facold: f64,
    last_rejected: bool,
    pub stats: Stats,
}

impl<const N: usize> Dop853<N> {
    /// Initialize at `(t, y)`; the first step is chosen by the standard
    /// two-evaluation heuristic unless `h0` is given.
    pub fn new<S: OdeSystem<N>>(
        system: &S,
        t: f64,
        y: [f64; N],
        control: StepControl,
        h0: Option<f64>,
        h_max: f64,
    ) -> Result<Self, S::Error> {
        let mut f0 = [0.0; N];
        system.rhs(t, &y, &mut f0)?;
        let mut stepper = Dop853 {
            t,
            y,
            f0,
            h: 0.0,
            control,
            facold: 1e-4,
            last_rejected: false,
            stats: Stats { evaluations: 1, ..Stats::default() },
        };
        stepper.h = match h0 {
            Some(h) => h.min(h_max),
            None => stepper.initial_step(system, h_max)?,
        };
        Ok(stepper)
    }

    fn block_scales(&self, y_old: &[f64; N], y_new: &[f64; N]) -> [f64; N] {
        let mut sk = [0.0; N];
        let mut i = 0;
        while i < N {
            let j = (i + 2).min(N);
            let norm = |v: &[f64; N]| v[i..j].iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = self.control.abs_tol + self.control.rel_tol * norm(y_old).max(norm(y_new));
            sk[i..j].iter_mut().for_each(|x| *x = s);
            i = j;
        }
        sk
    }

    fn initial_step<S: OdeSystem<N>>(&mut self, system: &S, h_max: f64) -> Result<f64, S::Error> {
        let sk = self.block_scales(&self.y, &self.y);
        let wnorm = |v: &[f64; N]| -> f64 { v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() };
        let dnf = wnorm(&self.f0);
        let dny = wnorm(&self.y);
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * (dny / dnf).sqrt() };
        h = h.min(h_max);
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = self.y[i] + h * self.f0[i];
        }
        let mut f1 = [0.0; N];
        system.rhs(self.t + h, &y1, &mut f1)?;
        self.stats.evaluations += 1;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.f0[i];
        }
        let der2 = wnorm(&diff).sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
        Ok((100.0 * h).min(h1).min(h_max))
    }

    /// Attempt one step of size `min(self.h, h_limit)`.
    ///
    /// On acceptance `t`, `y` advance and `h` holds the proposal for the next
    /// step; on rejection only `h` shrinks. When the step was shortened to
    /// `h_limit` the unconstrained proposal is kept so that landing on output
    /// times does not throttle the step size.
    pub fn step<S: OdeSystem<N>>(&mut self, system: &S, h_limit: f64) -> Result<Attempt, S::Error> {
        let natural = self.h;
        let clipped = natural > h_limit;
        let h = if clipped { h_limit } else { natural };
        let (t, y) = (self.t, self.y);
        let k1 = self.f0;

        let mut k = [[0.0; N]; 12];
        k[0] = k1;
        let mut ytmp = [0.0; N];
        macro_rules! stage {
            ($dst:expr, $c:expr, $( ($idx:expr, $a:expr) ),+ ) => {{
                for i in 0..N {
                    ytmp[i] = y[i] + h * (0.0 $( + $a * k[$idx][i] )+);
                }
                system.rhs(t + $c * h, &ytmp, &mut k[$dst])?;
            }};
        }
        stage!(1, C2, (0, A21));
        stage!(2, C3, (0, A31), (1, A32));
        stage!(3, C4, (0, A41), (2, A43));
        stage!(4, C5, (0, A51), (2, A53), (3, A54));
        stage!(5, C6, (0, A61), (3, A64), (4, A65));
        stage!(6, C7, (0, A71), (3, A74), (4, A75), (5, A76));
        stage!(7, C8, (0, A81), (3, A84), (4, A85), (5, A86), (6, A87));
        stage!(8, C9, (0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98));
        stage!(9, C10, (0, A101), (3, A104), (4, A105), (5, A106), (6, A107), (7, A108), (8, A109));
        stage!(10, C11, (0, A111), (3, A114), (4, A115), (5, A116), (6, A117), (7, A118), (8, A119), (9, A1110));
        stage!(11, 1.0, (0, A121), (3, A124), (4, A125), (5, A126), (6, A127), (7, A128), (8, A129), (9, A1210), (10, A1211));
        self.stats.evaluations += 11;

        let mut incr = [0.0; N];
        let mut y_new = [0.0; N];
        for i in 0..N {
            incr[i] = B1 * k[0][i] + B6 * k[5][i] + B7 * k[6][i] + B8 * k[7][i] + B9 * k[8][i] + B10 * k[9][i]
                + B11 * k[10][i]
                + B12 * k[11][i];
            y_new[i] = y[i] + h * incr[i];
        }

        let sk = self.block_scales(&y, &y_new);
        let (mut err, mut err2) = (0.0, 0.0);
        for i in 0..N {
            let e3 = incr[i] - BHH1 * k[0][i] - BHH2 * k[8][i] - BHH3 * k[11][i];
            err2 += (e3 / sk[i]).powi(2);
            let e5 = ER1 * k[0][i] + ER6 * k[5][i] + ER7 * k[6][i] + ER8 * k[7][i] + ER9 * k[8][i] + ER10 * k[9][i]
                + ER11 * k[10][i]
                + ER12 * k[11][i];
            err += (e5 / sk[i]).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();

        let c = &self.control;
        let fac11 = err.powf(1.0 / 8.0);
        let fac = (1.0 / c.max_factor).max((1.0 / c.min_factor).min(fac11 / c.safety));
        let mut h_new = h / fac;

        if err <= 1.0 {
            let mut f_new = [0.0; N];
            system.rhs(t + h, &y_new, &mut f_new)?;
            self.stats.evaluations += 1;
            self.stats.accepted += 1;
            self.facold = err.max(1e-4);
            if self.last_rejected {
                h_new = h_new.min(h);
            }
            if clipped {
                h_new = h_new.max(natural);
            }
            self.last_rejected = false;
            self.t = t + h;
            self.y = y_new;
            self.f0 = f_new;
            self.h = h_new;
            Ok(Attempt::Accepted)
        } else {
            self.stats.rejected += 1;
            self.last_rejected = true;
            self.h = h / (1.0 / c.min_factor).min(fac11 / c.safety);
            Ok(Attempt::Rejected)
        }
    }
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
