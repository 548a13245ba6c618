use num_complex::Complex64;

use crate::channel::{noise_variance, ChannelPair, NoiseModel};
use crate::error::{Error, Result};
use crate::mathcore::{principal_eigenvector, ComplexMatrix, RandomStream, ZeroForcing};
use crate::modem::{Constellation, EncodedFrame, MappingPlan};

/// Transmit beamformer: unit-norm principal eigenvector of `HᴴFᴴFH`.
pub fn design_beamformer(ch: &ChannelPair) -> Result<Vec<Complex64>> {
    let g = ch.f().matmul(ch.h())?;
    let a = g.adjoint().matmul(&g)?;
    let (w, _) = principal_eigenvector(&a)?;
    Ok(w)
}

/// Assignment of IRS elements to independently modulated symbol slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotMap {
    of_element: Vec<usize>,
    slots: usize,
}

impl SlotMap {
    /// One slot per element.
    pub fn identity(elements: usize) -> Self {
        Self {
            of_element: (0..elements).collect(),
            slots: elements,
        }
    }

    /// Equal square blocks on an `irs_side × irs_side` grid, numbered
    /// row-major.
    pub fn blocks(irs_side: usize, block_count: usize) -> Result<Self> {
        let bs = (block_count as f64).sqrt().round() as usize;
        if bs == 0 || bs * bs != block_count || !irs_side.is_multiple_of(bs) {
            return Err(Error::InvalidParameter(format!(
                "{block_count} blocks do not tile a {irs_side}x{irs_side} surface"
            )));
        }
        let size = irs_side / bs;
        let of_element = (0..irs_side * irs_side)
            .map(|l| (l / irs_side / size) * bs + (l % irs_side) / size)
            .collect();
        Ok(Self {
            of_element,
            slots: block_count,
        })
    }

    pub fn from_plan(plan: &MappingPlan) -> Self {
        Self {
            of_element: plan.slot_map(),
            slots: plan.slots(),
        }
    }

    pub fn new(of_element: Vec<usize>, slots: usize) -> Result<Self> {
        if slots == 0 || of_element.iter().any(|&s| s >= slots) {
            return Err(Error::InvalidParameter("slot map references a missing slot".into()));
        }
        let mut used = vec![false; slots];
        for &s in &of_element {
            used[s] = true;
        }
        if used.contains(&false) {
            return Err(Error::InvalidParameter("every slot needs at least one element".into()));
        }
        Ok(Self { of_element, slots })
    }

    pub fn elements(&self) -> usize {
        self.of_element.len()
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn slot_of(&self, element: usize) -> usize {
        self.of_element[element]
    }

    pub fn is_identity(&self) -> bool {
        self.slots == self.of_element.len() && self.of_element.iter().enumerate().all(|(i, &s)| i == s)
    }
}

#[derive(Debug, Clone)]
pub struct LinkOptions {
    /// Transmit power in watts; scales `V` by `√P`.
    pub tx_power_w: f64,
    /// Block reduction; `None` gives every element its own symbol.
    pub slots: Option<SlotMap>,
}

impl Default for LinkOptions {
    fn default() -> Self {
        Self {
            tx_power_w: 1.0,
            slots: None,
        }
    }
}

/// Derived operators of one channel realization.
#[derive(Debug, Clone)]
pub struct LinkState {
    w: Vec<Complex64>,
    /// `√P·F·diag(Hw)`, `N_r × L`.
    v: ComplexMatrix,
    slots: SlotMap,
    /// Columns of `v` summed per slot, `N_r × S`.
    v_slot: ComplexMatrix,
    zf: ZeroForcing,
    sigma2: f64,
    c_diag: Vec<f64>,
}

/// Builds `V = F·diag(Hw)`, its zero-forcing equalizer and the noise level.
///
/// With block reduction the equalizer inverts the block-summed `V`, so only
/// `N_r ≥ slots` is required.
pub fn build_link(
    ch: &ChannelPair,
    w: &[Complex64],
    noise: &NoiseModel,
    opts: &LinkOptions,
) -> Result<LinkState> {
    let dims = ch.dims();
    if w.len() != dims.tx {
        return Err(Error::InvalidParameter(format!(
            "beamformer has {} entries for {} transmit antennas",
            w.len(),
            dims.tx
        )));
    }
    if !(opts.tx_power_w > 0.0 && opts.tx_power_w.is_finite()) {
        return Err(Error::InvalidParameter("transmit power must be positive".into()));
    }
    let slots = opts.slots.clone().unwrap_or_else(|| SlotMap::identity(dims.elements));
    if slots.elements() != dims.elements {
        return Err(Error::InvalidParameter(format!(
            "slot map covers {} elements, channel has {}",
            slots.elements(),
            dims.elements
        )));
    }
    if dims.rx < slots.slots() {
        return Err(Error::InvalidParameter(format!(
            "{} receive antennas cannot separate {} symbols; enable block reduction",
            dims.rx,
            slots.slots()
        )));
    }
    let hw = ch.h().mul_vec(w)?;
    let amp = opts.tx_power_w.sqrt();
    let d: Vec<Complex64> = hw.iter().map(|x| x * amp).collect();
    let v = ch.f().scale_columns(&d)?;
    let v_slot = if slots.is_identity() {
        v.clone()
    } else {
        let mut m = ComplexMatrix::zeros(dims.rx, slots.slots());
        for r in 0..dims.rx {
            for (l, &x) in v.row(r).iter().enumerate() {
                m[(r, slots.slot_of(l))] += x;
            }
        }
        m
    };
    let zf = ZeroForcing::new(&v_slot)?;
    let mut link = LinkState {
        w: w.to_vec(),
        v,
        slots,
        v_slot,
        zf,
        sigma2: 0.0,
        c_diag: Vec::new(),
    };
    link.set_noise(noise)?;
    Ok(link)
}

impl LinkState {
    /// Re-derives `σ²` and `C_ll` for another noise setting on the same channel.
    pub fn set_noise(&mut self, noise: &NoiseModel) -> Result<()> {
        let sigma2 = noise_variance(noise, Some(self.zf.noise_gains()))?;
        self.set_sigma2(sigma2)
    }

    /// Sets `σ²` directly.
    pub fn set_sigma2(&mut self, sigma2: f64) -> Result<()> {
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid noise variance {sigma2}")));
        }
        self.sigma2 = sigma2;
        self.c_diag = self.zf.noise_gains().iter().map(|g| sigma2 * g).collect();
        Ok(())
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    /// Per-element effective channel `V`.
    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// Effective channel seen by the equalizer (block-summed `V`).
    pub fn v_slot(&self) -> &ComplexMatrix {
        &self.v_slot
    }

    pub fn slots(&self) -> &SlotMap {
        &self.slots
    }

    /// Explicit `U`; the link itself keeps the factored form.
    pub fn u_matrix(&self) -> ComplexMatrix {
        self.zf.matrix()
    }

    pub fn equalize(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.zf.equalize(y)
    }

    /// `[UUᴴ]_ll`
    pub fn g_diag(&self) -> &[f64] {
        self.zf.noise_gains()
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `C_ll = σ²·[UUᴴ]_ll`
    pub fn c_diag(&self) -> &[f64] {
        &self.c_diag
    }

    pub fn elements(&self) -> usize {
        self.v.cols()
    }

    pub fn receivers(&self) -> usize {
        self.v.rows()
    }
}

/// Received samples and the transmitted slot indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RxObservation {
    pub y: Vec<Complex64>,
    pub truth: Vec<usize>,
}

/// `y = V_masked·θ + z`, `z ~ CN(0, σ²I)`. Masked elements contribute
/// nothing; the equalizer is unaware of them.
pub fn transmit(
    link: &LinkState,
    frame: &EncodedFrame,
    mask: Option<&[bool]>,
    stream: &mut RandomStream,
) -> Result<RxObservation> {
    let theta = frame.theta.as_slice();
    let l = link.elements();
    if theta.len() != l || frame.indices.len() != link.slots.slots() {
        return Err(Error::InvalidParameter(format!(
            "frame has {} coefficients and {} symbols, link expects {} and {}",
            theta.len(),
            frame.indices.len(),
            l,
            link.slots.slots()
        )));
    }
    if let Some(m) = mask {
        if m.len() != l {
            return Err(Error::InvalidParameter(format!(
                "obstruction mask has {} entries for {l} elements",
                m.len()
            )));
        }
    }
    let blocked = |e: usize| mask.is_some_and(|m| m[e]);
    let mut y = Vec::with_capacity(link.receivers());
    for r in 0..link.receivers() {
        let row = link.v.row(r);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, (&vx, &t)) in row.iter().zip(theta).enumerate() {
            if !blocked(e) {
                acc += vx * t;
            }
        }
        y.push(acc);
    }
    if link.sigma2 > 0.0 {
        for v in &mut y {
            *v += stream.complex_gaussian(link.sigma2);
        }
    }
    Ok(RxObservation {
        y,
        truth: frame.indices.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub y_eq: Vec<Complex64>,
    pub decided: Vec<usize>,
    pub symbol_errors: usize,
    pub bit_errors: usize,
}

/// Zero-forcing equalization followed by per-slot nearest-point decisions.
pub fn detect(link: &LinkState, obs: &RxObservation, c: &Constellation) -> Result<DetectionReport> {
    if obs.y.len() != link.receivers() || obs.truth.len() != link.slots.slots() {
        return Err(Error::InvalidParameter(format!(
            "observation has {} samples and {} symbols, link expects {} and {}",
            obs.y.len(),
            obs.truth.len(),
            link.receivers(),
            link.slots.slots()
        )));
    }
    let y_eq = link.equalize(&obs.y);
    Ok(decide(y_eq, &obs.truth, c))
}

pub(crate) fn decide(y_eq: Vec<Complex64>, truth: &[usize], c: &Constellation) -> DetectionReport {
    let decided: Vec<usize> = y_eq.iter().map(|&y| c.nearest(y)).collect();
    let mut symbol_errors = 0;
    let mut bit_errors = 0;
    for (&d, &t) in decided.iter().zip(truth) {
        if d != t {
            symbol_errors += 1;
            bit_errors += c.bit_distance(d, t) as usize;
        }
    }
    DetectionReport {
        y_eq,
        decided,
        symbol_errors,
        bit_errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channel_pair, Dims, PathLossModel, RicianParams};
    use crate::mathcore::norm;
    use crate::modem::{expand_slots, ThetaFrame};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian_pair(dims: Dims, seed: u64) -> ChannelPair {
        let mut s = RandomStream::new(seed);
        let h = ComplexMatrix::from_fn(dims.elements, dims.tx, |_, _| s.complex_gaussian(1.0));
        let f = ComplexMatrix::from_fn(dims.rx, dims.elements, |_, _| s.complex_gaussian(1.0));
        ChannelPair::new(h, f).unwrap()
    }

    fn identity_link(l: usize, sigma2: f64) -> LinkState {
        let h = ComplexMatrix::from_fn(l, 1, |_, _| c64(1.0, 0.0));
        let ch = ChannelPair::new(h, ComplexMatrix::identity(l)).unwrap();
        let mut link = build_link(&ch, &[c64(1.0, 0.0)], &NoiseModel::TargetSnr { gamma_db: 0.0 }, &LinkOptions::default()).unwrap();
        link.set_sigma2(sigma2).unwrap();
        link
    }

    fn frame(indices: Vec<usize>, c: &Constellation) -> EncodedFrame {
        let theta = ThetaFrame::new(indices.iter().map(|&i| c.point(i)).collect()).unwrap();
        EncodedFrame { indices, theta }
    }

    #[test]
    fn single_antenna_beamformer() {
        let ch = gaussian_pair(Dims::new(4, 1, 4), 1);
        let w = design_beamformer(&ch).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0] - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_beamformer() {
        let h = ComplexMatrix::from_diagonal(&[c64(2.0, 0.0), c64(1.0, 0.0)]);
        let ch = ChannelPair::new(h, ComplexMatrix::identity(2)).unwrap();
        let w = design_beamformer(&ch).unwrap();
        assert!((w[0] - c64(1.0, 0.0)).norm() < 1e-9 && w[1].norm() < 1e-9);
    }

    #[test]
    fn beamformer_beats_random_directions() {
        let ch = gaussian_pair(Dims::new(8, 8, 8), 2);
        let w = design_beamformer(&ch).unwrap();
        assert!((norm(&w) - 1.0).abs() < 1e-12);
        let g = ch.f().matmul(ch.h()).unwrap();
        let best = norm(&g.mul_vec(&w).unwrap());
        let mut s = RandomStream::new(3);
        for _ in 0..1000 {
            let u: Vec<Complex64> = (0..8).map(|_| s.complex_gaussian(1.0)).collect();
            let n = norm(&u);
            let u: Vec<Complex64> = u.iter().map(|x| x / n).collect();
            assert!(norm(&g.mul_vec(&u).unwrap()) <= best + 1e-10);
        }
    }

    #[test]
    fn identity_link_operators() {
        let link = identity_link(4, 1.0);
        assert!(link.u_matrix().sub(&ComplexMatrix::identity(4)).max_abs() < 1e-12);
        assert!(link.g_diag().iter().all(|&g| (g - 1.0).abs() < 1e-12));
        assert!(link.c_diag().iter().all(|&c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_forcing_on_random_links() {
        let noise = NoiseModel::TargetSnr { gamma_db: 10.0 };
        let mut s = RandomStream::new(4);
        for dims in [Dims::new(8, 8, 8), Dims::new(16, 16, 32)] {
            for _ in 0..10 {
                let ch = draw_channel_pair(&mut s, dims, &RicianParams::default(), &PathLossModel::default()).unwrap();
                let w = design_beamformer(&ch).unwrap();
                let link = build_link(&ch, &w, &noise, &LinkOptions::default()).unwrap();
                let uv = link.u_matrix().matmul(link.v()).unwrap();
                assert!(uv.identity_defect() < 1e-9);
                assert!(link.c_diag().iter().all(|&c| c > 0.0));
                let mean_snr: f64 = link.c_diag().iter().map(|c| 1.0 / c).sum::<f64>() / dims.elements as f64;
                assert!((mean_snr / 10.0 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shortfall_needs_block_mode() {
        let ch = gaussian_pair(Dims::new(16, 4, 4), 5);
        let w = design_beamformer(&ch).unwrap();
        let noise = NoiseModel::default();
        assert!(build_link(&ch, &w, &noise, &LinkOptions::default()).is_err());
        let plan = MappingPlan::new(4, 2, &Constellation::bpsk(), Some(4)).unwrap();
        let opts = LinkOptions {
            slots: Some(SlotMap::from_plan(&plan)),
            ..LinkOptions::default()
        };
        let link = build_link(&ch, &w, &noise, &opts).unwrap();
        assert_eq!(link.g_diag().len(), 4);
        let uv = link.u_matrix().matmul(link.v_slot()).unwrap();
        assert!(uv.identity_defect() < 1e-9);
    }

    #[test]
    fn block_map_matches_plan() {
        let plan = MappingPlan::new(6, 3, &Constellation::bpsk(), Some(9)).unwrap();
        assert_eq!(SlotMap::blocks(6, 9).unwrap(), SlotMap::from_plan(&plan));
        assert!(SlotMap::blocks(6, 16).is_err());
        assert!(SlotMap::blocks(6, 8).is_err());
    }

    #[test]
    fn block_power_exceeds_single_element() {
        let c = Constellation::bpsk();
        let plan = MappingPlan::new(4, 2, &c, Some(4)).unwrap();
        let slots = SlotMap::from_plan(&plan);
        let mut s = RandomStream::new(6);
        for _ in 0..100 {
            let ch = draw_channel_pair(&mut s, Dims::new(16, 4, 4), &RicianParams::default(), &PathLossModel::default()).unwrap();
            let w = design_beamformer(&ch).unwrap();
            let opts = LinkOptions { slots: Some(slots.clone()), ..LinkOptions::default() };
            let link = build_link(&ch, &w, &NoiseModel::default(), &opts).unwrap();
            let col_power = |m: &ComplexMatrix, j: usize| m.column(j).iter().map(|x| x.norm_sqr()).sum::<f64>();
            let block: f64 = (0..4).map(|b| col_power(link.v_slot(), b)).sum::<f64>() / 4.0;
            let single: f64 = (0..16).map(|l| col_power(link.v(), l)).sum::<f64>() / 16.0;
            assert!(block / single > 1.0);
        }
    }

    #[test]
    fn noiseless_transmission() {
        let ch = gaussian_pair(Dims::new(6, 3, 8), 7);
        let w = design_beamformer(&ch).unwrap();
        let mut link = build_link(&ch, &w, &NoiseModel::default(), &LinkOptions::default()).unwrap();
        link.set_sigma2(0.0).unwrap();
        let c = Constellation::psk(8).unwrap();
        let f = frame(vec![0, 1, 2, 3, 7, 5], &c);
        let mut s = RandomStream::new(8);
        let obs = transmit(&link, &f, None, &mut s).unwrap();
        let want = link.v().mul_vec(f.theta.as_slice()).unwrap();
        for (a, b) in obs.y.iter().zip(&want) {
            assert!((a - b).norm() < 1e-15 * (1.0 + b.norm()));
        }
        let rep = detect(&link, &obs, &c).unwrap();
        assert_eq!(rep.symbol_errors, 0);
        assert_eq!(rep.decided, f.indices);
    }

    #[test]
    fn full_mask_leaves_noise_only() {
        let link = identity_link(4, 0.5);
        let c = Constellation::bpsk();
        let f = frame(vec![1, 0, 1, 1], &c);
        let mut a = RandomStream::new(9);
        let mut b = RandomStream::new(9);
        let obs = transmit(&link, &f, Some(&[true; 4]), &mut a).unwrap();
        let z: Vec<Complex64> = (0..4).map(|_| b.complex_gaussian(0.5)).collect();
        assert_eq!(obs.y, z);
        let mut again = RandomStream::new(9);
        assert_eq!(transmit(&link, &f, Some(&[true; 4]), &mut again).unwrap(), obs);
    }

    #[test]
    fn bpsk_sign_decision() {
        let c = Constellation::bpsk();
        let rep = decide(vec![c64(-0.1, 0.0), c64(0.2, 0.0)], &[0, 0], &c);
        assert_eq!(rep.decided, vec![1, 0]);
        assert_eq!((rep.symbol_errors, rep.bit_errors), (1, 1));
        let q = Constellation::psk(4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(decide(vec![c64(s, s)], &[1], &q).decided, vec![0]);
    }

    #[test]
    fn equalized_noise_covariance() {
        let ch = gaussian_pair(Dims::new(4, 2, 6), 10);
        let w = design_beamformer(&ch).unwrap();
        let link = build_link(&ch, &w, &NoiseModel::TargetSnr { gamma_db: 3.0 }, &LinkOptions::default()).unwrap();
        let u = link.u_matrix();
        let want = u.matmul(&u.adjoint()).unwrap().scale(c64(link.sigma2(), 0.0));
        let n = 100_000;
        let mut s = RandomStream::new(11);
        let mut cov = ComplexMatrix::zeros(4, 4);
        for _ in 0..n {
            let z: Vec<Complex64> = (0..6).map(|_| s.complex_gaussian(link.sigma2())).collect();
            let uz = link.equalize(&z);
            for i in 0..4 {
                for j in 0..4 {
                    cov[(i, j)] += uz[i] * uz[j].conj();
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let emp = cov[(i, j)] / n as f64;
                let scale = (want[(i, i)].re * want[(j, j)].re).sqrt();
                assert!((emp - want[(i, j)]).norm() <= 0.03 * scale, "({i},{j}) {emp} vs {}", want[(i, j)]);
            }
        }
        // Per-element variance of y_eq − θ against C_ll.
        let c = Constellation::psk(4).unwrap();
        let mut var = [0.0; 4];
        for _ in 0..n {
            let idx: Vec<usize> = (0..4).map(|_| s.index(4)).collect();
            let f = frame(idx, &c);
            let obs = transmit(&link, &f, None, &mut s).unwrap();
            let rep = detect(&link, &obs, &c).unwrap();
            for l in 0..4 {
                var[l] += (rep.y_eq[l] - f.theta.as_slice()[l]).norm_sqr();
            }
        }
        for l in 0..4 {
            assert!((var[l] / n as f64 / link.c_diag()[l] - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn block_frames_through_link() {
        let c = Constellation::bpsk();
        let plan = MappingPlan::new(4, 2, &c, Some(4)).unwrap();
        let ch = gaussian_pair(Dims::new(16, 2, 4), 12);
        let w = design_beamformer(&ch).unwrap();
        let opts = LinkOptions { slots: Some(SlotMap::from_plan(&plan)), ..LinkOptions::default() };
        let mut link = build_link(&ch, &w, &NoiseModel::default(), &opts).unwrap();
        link.set_sigma2(0.0).unwrap();
        let theta = expand_slots(&[1, 0, 0, 1], &plan, &c).unwrap();
        let f = EncodedFrame { indices: vec![1, 0, 0, 1], theta };
        let obs = transmit(&link, &f, None, &mut RandomStream::new(0)).unwrap();
        assert_eq!(detect(&link, &obs, &c).unwrap().decided, vec![1, 0, 0, 1]);
    }
}
