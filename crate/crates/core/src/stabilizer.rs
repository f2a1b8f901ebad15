//! Exact Clifford simulation in the stabilizer-tableau representation.
//!
//! The tableau keeps the usual n stabilizer and n destabilizer generators
//! with sign bits, but stores them column-major: for every qubit there is an
//! X bit-column and a Z bit-column over the 2n generator rows. Gates then
//! touch two to four columns with word-parallel operations over all rows at
//! once, which is what makes the large-L sweeps affordable; measurements do
//! the usual anticommuting-row reduction with the phase arithmetic carried in
//! bit-sliced mod-4 counters.
//!
//! Subsystem entropy uses the GF(2) identity S_A = rank(G|_A) - |A| over the
//! stabilizer rows restricted to the region's X/Z columns.

use crate::bits::{words_for, BitString, Region};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use std::fmt;

#[derive(Clone)]
pub struct Tableau {
    n: usize,
    /// words per row-bitset (covers 2n generator rows)
    rw: usize,
    /// x[c * rw + w]: X bits of qubit column c over all rows
    x: Vec<u64>,
    z: Vec<u64>,
    /// sign bits per row
    r: Vec<u64>,
    overrides: u64,
    scratch_s: Vec<u64>,
    scratch_lo: Vec<u64>,
    scratch_hi: Vec<u64>,
}

/// What a composite measurement actually did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureRecord {
    pub outcome: bool,
    pub random: bool,
    /// Deterministic outcome contradicted the requested one and won.
    pub overridden: bool,
}

impl Tableau {
    /// |+x>^n: stabilizers X_i, destabilizers Z_i, all signs +.
    pub fn plus_state(n: usize) -> Self {
        assert!(n >= 1);
        let rw = words_for(2 * n);
        let mut t = Tableau {
            n,
            rw,
            x: vec![0; n * rw],
            z: vec![0; n * rw],
            r: vec![0; rw],
            overrides: 0,
            scratch_s: vec![0; rw],
            scratch_lo: vec![0; rw],
            scratch_hi: vec![0; rw],
        };
        for i in 0..n {
            t.set_bit_x(i, n + i, true); // stabilizer i: X_i
            t.set_bit_z(i, i, true); // destabilizer i: Z_i
        }
        t
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Count of deterministic-outcome overrides seen so far.
    pub fn overrides(&self) -> u64 {
        self.overrides
    }

    #[inline]
    fn col<'a>(&self, v: &'a [u64], c: usize) -> &'a [u64] {
        &v[c * self.rw..(c + 1) * self.rw]
    }

    #[inline]
    fn set_bit_x(&mut self, c: usize, row: usize, v: bool) {
        set_bit(&mut self.x[c * self.rw..(c + 1) * self.rw], row, v);
    }

    #[inline]
    fn set_bit_z(&mut self, c: usize, row: usize, v: bool) {
        set_bit(&mut self.z[c * self.rw..(c + 1) * self.rw], row, v);
    }

    fn check_site(&self, site: u32) -> Result<usize> {
        if (site as usize) < self.n {
            Ok(site as usize)
        } else {
            Err(Error::SiteOutOfRange { site, n: self.n as u32 })
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::CnotL(a, b) => self.cnot(self.check_site(a)?, self.check_site(b)?),
            Gate::CnotR(a, b) => self.cnot(self.check_site(b)?, self.check_site(a)?),
            Gate::Cz(a, b) => self.cz(self.check_site(a)?, self.check_site(b)?),
            Gate::Swap(a, b) => self.swap(self.check_site(a)?, self.check_site(b)?),
            Gate::H(a) => self.hadamard(self.check_site(a)?),
            Gate::Rz(..) => {
                return Err(Error::UnsupportedGate {
                    kind: GateKind::Rz,
                    reason: "generic angles are not Clifford",
                })
            }
            Gate::Measure(_) => {
                return Err(Error::UnsupportedGate {
                    kind: GateKind::Measure,
                    reason: "use composite_measure with an outcome",
                })
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, a: usize) {
        let rw = self.rw;
        let (xa, za) = (a * rw, a * rw);
        for w in 0..rw {
            let xv = self.x[xa + w];
            let zv = self.z[za + w];
            self.r[w] ^= xv & zv;
            self.x[xa + w] = zv;
            self.z[za + w] = xv;
        }
    }

    /// CNOT with control `a`, target `b`.
    fn cnot(&mut self, a: usize, b: usize) {
        let rw = self.rw;
        for w in 0..rw {
            let xa = self.x[a * rw + w];
            let xb = self.x[b * rw + w];
            let za = self.z[a * rw + w];
            let zb = self.z[b * rw + w];
            self.r[w] ^= xa & zb & !(xb ^ za);
            self.x[b * rw + w] = xb ^ xa;
            self.z[a * rw + w] = za ^ zb;
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        let rw = self.rw;
        for w in 0..rw {
            let xa = self.x[a * rw + w];
            let xb = self.x[b * rw + w];
            let za = self.z[a * rw + w];
            let zb = self.z[b * rw + w];
            self.r[w] ^= xa & xb & (za ^ zb);
            self.z[a * rw + w] = za ^ xb;
            self.z[b * rw + w] = zb ^ xa;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let rw = self.rw;
        for w in 0..rw {
            self.x.swap(a * rw + w, b * rw + w);
            self.z.swap(a * rw + w, b * rw + w);
        }
    }

    /// Projective Z measurement at `site` forcing `outcome` where the result
    /// is random. A deterministic result overrides the request (recorded in
    /// the returned record and the override counter); the composite gate then
    /// applies H at the site.
    pub fn composite_measure(&mut self, site: u32, outcome: bool) -> Result<MeasureRecord> {
        let a = self.check_site(site)?;
        let rec = self.measure_z_forced(a, outcome);
        self.hadamard(a);
        Ok(rec)
    }

    fn measure_z_forced(&mut self, a: usize, want: bool) -> MeasureRecord {
        match self.find_anticommuting_stabilizer(a) {
            Some(p) => {
                self.random_branch(a, p, want);
                MeasureRecord { outcome: want, random: true, overridden: false }
            }
            None => {
                let outcome = self.deterministic_outcome(a);
                let overridden = outcome != want;
                if overridden {
                    self.overrides += 1;
                }
                MeasureRecord { outcome, random: false, overridden }
            }
        }
    }

    /// Lowest stabilizer row (index >= n) whose X bit at column `a` is set.
    fn find_anticommuting_stabilizer(&self, a: usize) -> Option<usize> {
        let col = self.col(&self.x, a);
        let start_w = self.n / 64;
        let off = self.n % 64;
        for w in start_w..self.rw {
            let mut m = col[w];
            if w == start_w && off != 0 {
                m &= !((1u64 << off) - 1);
            }
            if m != 0 {
                return Some(w * 64 + m.trailing_zeros() as usize);
            }
        }
        None
    }

    /// The standard random-outcome update: multiply every other anticommuting
    /// generator by row p, move row p to its destabilizer slot, and replace it
    /// with (+/-) Z_a.
    fn random_branch(&mut self, a: usize, p: usize, want: bool) {
        let rw = self.rw;
        let n = self.n;
        let (pw, pb) = (p / 64, p % 64);
        // rows to update: every generator anticommuting with Z_a except p
        for w in 0..rw {
            self.scratch_s[w] = self.x[a * rw + w];
        }
        self.scratch_s[pw] &= !(1u64 << pb);

        // mod-4 phase counters, bit-sliced over rows: acc = 2 r_h + 2 r_p + sum_c g
        let rp = (self.r[pw] >> pb) & 1 == 1;
        for w in 0..rw {
            self.scratch_lo[w] = 0;
            self.scratch_hi[w] = self.r[w] ^ if rp { !0u64 } else { 0 };
        }

        for c in 0..n {
            let xc = c * rw;
            let xp = (self.x[xc + pw] >> pb) & 1 == 1;
            let zp = (self.z[xc + pw] >> pb) & 1 == 1;
            if !xp && !zp {
                continue;
            }
            for w in 0..rw {
                let xh = self.x[xc + w];
                let zh = self.z[xc + w];
                // g(x_p, z_p, x_h, z_h) per row as +1/-1 masks
                let (pos, neg) = match (xp, zp) {
                    (true, true) => (zh & !xh, xh & !zh),
                    (true, false) => (zh & xh, zh & !xh),
                    (false, true) => (xh & !zh, xh & zh),
                    (false, false) => unreachable!(),
                };
                let lo = self.scratch_lo[w];
                // +1 then -1 on the two's-bit planes
                let carry = lo & pos;
                let lo1 = lo ^ pos;
                let borrow = neg & !lo1;
                self.scratch_lo[w] = lo1 ^ neg;
                self.scratch_hi[w] ^= carry ^ borrow;
                // row_h ^= row_p on the touched columns
                let s = self.scratch_s[w];
                if xp {
                    self.x[xc + w] = xh ^ s;
                }
                if zp {
                    self.z[xc + w] = zh ^ s;
                }
            }
        }
        // destabilizer signs are never read, and the evenness guarantee only
        // holds among commuting rows, so the check covers stabilizers only
        #[cfg(debug_assertions)]
        {
            let (sw, so) = (n / 64, n % 64);
            for w in sw..rw {
                let mut mask = !0u64;
                if w == sw && so != 0 {
                    mask = !((1u64 << so) - 1);
                }
                debug_assert_eq!(
                    self.scratch_lo[w] & self.scratch_s[w] & mask,
                    0,
                    "odd phase in stabilizer rowsum"
                );
            }
        }
        for w in 0..rw {
            self.r[w] = (self.r[w] & !self.scratch_s[w]) | (self.scratch_hi[w] & self.scratch_s[w]);
        }

        // destabilizer (p - n) := old row p; row p := (+/-) Z_a
        let d = p - n;
        let (dw, db) = (d / 64, d % 64);
        for c in 0..n {
            let xc = c * rw;
            let xp = (self.x[xc + pw] >> pb) & 1;
            let zp = (self.z[xc + pw] >> pb) & 1;
            self.x[xc + dw] = (self.x[xc + dw] & !(1 << db)) | (xp << db);
            self.z[xc + dw] = (self.z[xc + dw] & !(1 << db)) | (zp << db);
            self.x[xc + pw] &= !(1 << pb);
            self.z[xc + pw] &= !(1 << pb);
        }
        self.z[a * rw + pw] |= 1 << pb;
        let rp_bit = (self.r[pw] >> pb) & 1;
        self.r[dw] = (self.r[dw] & !(1 << db)) | (rp_bit << db);
        self.r[pw] = (self.r[pw] & !(1 << pb)) | ((want as u64) << pb);
    }

    /// Z_a is in (+/-) the stabilizer group; recover its sign by accumulating
    /// the stabilizer partners of every destabilizer that anticommutes with Z_a.
    fn deterministic_outcome(&self, a: usize) -> bool {
        let n = self.n;
        let cw = words_for(n);
        let mut sx = vec![0u64; cw];
        let mut sz = vec![0u64; cw];
        let mut acc: i64 = 0;
        let xa = self.col(&self.x, a);
        for d in 0..n {
            if (xa[d / 64] >> (d % 64)) & 1 == 0 {
                continue;
            }
            let src = n + d;
            let (sw, sb) = (src / 64, src % 64);
            acc += 2 * ((self.r[sw] >> sb) & 1) as i64;
            for c in 0..n {
                let xs = (self.x[c * self.rw + sw] >> sb) & 1 == 1;
                let zs = (self.z[c * self.rw + sw] >> sb) & 1 == 1;
                if !xs && !zs {
                    continue;
                }
                let (cwi, cbi) = (c / 64, c % 64);
                let xh = (sx[cwi] >> cbi) & 1 == 1;
                let zh = (sz[cwi] >> cbi) & 1 == 1;
                acc += g_scalar(xs, zs, xh, zh);
                if xs {
                    sx[cwi] ^= 1 << cbi;
                }
                if zs {
                    sz[cwi] ^= 1 << cbi;
                }
            }
        }
        debug_assert_eq!(acc.rem_euclid(2), 0);
        acc.rem_euclid(4) == 2
    }

    /// Stabilizer rows restricted to the region's interleaved X/Z columns
    /// (column 2k is X of the region's k-th site, 2k+1 its Z).
    fn restricted_matrix(&self, sites: &[usize]) -> BitMatrix {
        let n = self.n;
        let mut m = BitMatrix::zeros(n, 2 * sites.len());
        for (k, &site) in sites.iter().enumerate() {
            let xcol = self.col(&self.x, site);
            let zcol = self.col(&self.z, site);
            for row in 0..n {
                let (w, b) = ((n + row) / 64, (n + row) % 64);
                if (xcol[w] >> b) & 1 == 1 {
                    m.set(row, 2 * k, true);
                }
                if (zcol[w] >> b) & 1 == 1 {
                    m.set(row, 2 * k + 1, true);
                }
            }
        }
        m
    }

    /// Renyi entropy of `region` (equal for all orders on stabilizer states).
    pub fn renyi_entropy(&self, region: &Region) -> u32 {
        if region.is_empty() {
            return 0;
        }
        let rank = self.restricted_matrix(region.sites()).rank();
        (rank - region.len()) as u32
    }

    /// Entropies of every prefix region [0, k) for k in 1..=upto, from a
    /// single elimination pass.
    pub fn prefix_entropies(&self, upto: usize) -> Vec<u32> {
        let sites: Vec<usize> = (0..upto).collect();
        let ranks = self.restricted_matrix(&sites).prefix_ranks();
        (1..=upto).map(|k| (ranks[2 * k - 1] - k) as u32).collect()
    }

    pub fn mutual_information(&self, a: &Region, b: &Region) -> Result<u32> {
        if !a.is_disjoint(b) {
            return Err(Error::OverlappingRegions);
        }
        let sa = self.renyi_entropy(a);
        let sb = self.renyi_entropy(b);
        let sab = self.renyi_entropy(&a.union(b));
        Ok(sa + sb - sab)
    }

    /// Replay a recorded circuit; returns the number of outcome overrides.
    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<u32> {
        let before = self.overrides;
        for (li, layer) in c.layers.iter().enumerate() {
            let mut events = c.events_for_layer(li).iter();
            for gate in &layer.gates {
                if let Gate::Measure(site) = gate {
                    let ev = events.next().expect("event per measure gate");
                    self.composite_measure(*site, ev.outcome)?;
                } else {
                    self.apply(gate)?;
                }
            }
        }
        Ok((self.overrides - before) as u32)
    }

    /// Generator row as (x bits, z bits, sign), sites packed over columns.
    pub fn row(&self, row: usize) -> (BitString, BitString, bool) {
        let mut x = BitString::zeros(self.n);
        let mut z = BitString::zeros(self.n);
        let (w, b) = (row / 64, row % 64);
        for c in 0..self.n {
            x.set(c, (self.x[c * self.rw + w] >> b) & 1 == 1);
            z.set(c, (self.z[c * self.rw + w] >> b) & 1 == 1);
        }
        (x, z, (self.r[w] >> b) & 1 == 1)
    }

    pub fn stabilizer_row(&self, i: usize) -> (BitString, BitString, bool) {
        self.row(self.n + i)
    }

    /// Structural invariants; used by tests and debug builds. O(n^3).
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.n;
        let rows: Vec<_> = (0..2 * n).map(|i| self.row(i)).collect();
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let anti = symplectic(&rows[i], &rows[j]);
                let expect = i < n && j == n + i; // destabilizer_i vs stabilizer_i
                if anti != expect {
                    return Err(format!("rows {i},{j}: anticommute={anti}, expected {expect}"));
                }
            }
        }
        let mut m = BitMatrix::zeros(n, 2 * n);
        for (i, (x, z, _)) in rows[n..].iter().enumerate() {
            for c in 0..n {
                m.set(i, 2 * c, x.get(c));
                m.set(i, 2 * c + 1, z.get(c));
            }
        }
        if m.rank() != n {
            return Err("stabilizer rows not independent".into());
        }
        Ok(())
    }
}

#[inline]
fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let m = 1u64 << (i % 64);
    if v {
        words[i / 64] |= m;
    } else {
        words[i / 64] &= !m;
    }
}

fn g_scalar(x1: bool, z1: bool, x2: bool, z2: bool) -> i64 {
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 as i64 - x2 as i64,
        (true, false) => {
            if z2 {
                2 * (x2 as i64) - 1
            } else {
                0
            }
        }
        (false, true) => {
            if x2 {
                1 - 2 * (z2 as i64)
            } else {
                0
            }
        }
    }
}

fn symplectic(a: &(BitString, BitString, bool), b: &(BitString, BitString, bool)) -> bool {
    let mut parity = 0u32;
    for w in 0..a.0.words().len() {
        parity ^= ((a.0.words()[w] & b.1.words()[w]).count_ones()
            ^ (a.1.words()[w] & b.0.words()[w]).count_ones())
            & 1;
    }
    parity == 1
}

impl fmt::Display for Tableau {
    /// One stabilizer generator per line in +/- X/Y/Z/I notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let (x, z, neg) = self.stabilizer_row(i);
            write!(f, "{}", if neg { '-' } else { '+' })?;
            for c in 0..self.n {
                let ch = match (x.get(c), z.get(c)) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => 'Y',
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{generate_circuit, Boundary, CircuitSpec, Model};
    use crate::oracle::DenseState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_matches_oracle(tab: &Tableau, psi: &DenseState) {
        for i in 0..tab.n_qubits() {
            let (x, z, neg) = tab.stabilizer_row(i);
            let e = psi.pauli_expectation(&x, &z, neg);
            assert!(
                (e.re - 1.0).abs() < 1e-9 && e.im.abs() < 1e-9,
                "generator {i} expectation {e}"
            );
        }
    }

    #[test]
    fn plus_state_generators() {
        let t = Tableau::plus_state(2);
        assert_eq!(format!("{t}"), "+XI\n+IX\n");
        t.validate().unwrap();
        assert_eq!(t.renyi_entropy(&Region::range(2, 0, 1)), 0);
    }

    #[test]
    fn cz_on_plus_plus() {
        let mut t = Tableau::plus_state(2);
        t.apply(&Gate::Cz(0, 1)).unwrap();
        assert_eq!(format!("{t}"), "+XZ\n+ZX\n");
        assert_eq!(t.renyi_entropy(&Region::range(2, 0, 1)), 1);
        t.validate().unwrap();
    }

    #[test]
    fn h_maps_x_to_z() {
        let mut t = Tableau::plus_state(1);
        t.apply(&Gate::H(0)).unwrap();
        assert_eq!(format!("{t}"), "+Z\n");
    }

    #[test]
    fn cnot_fixes_control_z() {
        // CNOT with control 0 leaves Z_0 invariant
        let mut t = Tableau::plus_state(2);
        t.apply(&Gate::H(0)).unwrap(); // stabilizers {Z0, IX}
        t.apply(&Gate::CnotL(0, 1)).unwrap();
        let (x, z, neg) = t.stabilizer_row(0);
        assert!(!neg && !x.get(0) && z.get(0) && !x.get(1) && !z.get(1));
    }

    #[test]
    fn forced_measurement_on_plus_state() {
        for outcome in [false, true] {
            let mut t = Tableau::plus_state(2);
            let rec = t.composite_measure(0, outcome).unwrap();
            assert!(rec.random && !rec.overridden && rec.outcome == outcome);
            // X-basis product state again after the composite gate
            assert_eq!(t.renyi_entropy(&Region::range(2, 0, 1)), 0);
            let (x, z, neg) = t.stabilizer_row(0);
            assert!(x.get(0) && !z.get(0));
            assert_eq!(neg, outcome); // minus sign records sigma=1
            t.validate().unwrap();
        }
    }

    #[test]
    fn deterministic_outcome_is_overridden() {
        // |0> state: measuring Z must give 0 even if 1 was requested
        let mut t = Tableau::plus_state(1);
        t.apply(&Gate::H(0)).unwrap(); // now stabilized by +Z
        let rec = t.composite_measure(0, true).unwrap();
        assert!(!rec.random && rec.overridden && !rec.outcome);
        assert_eq!(t.overrides(), 1);
    }

    #[test]
    fn epr_prep_entropy_counts_pairs() {
        for l in [1usize, 2, 5, 17] {
            let mut t = Tableau::plus_state(2 * l);
            for i in 0..l {
                t.apply(&Gate::Cz(i as u32, (l + i) as u32)).unwrap();
            }
            assert_eq!(t.renyi_entropy(&Region::range(2 * l, 0, l)), l as u32);
        }
    }

    #[test]
    fn random_clifford_matches_oracle_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..30 {
            let n = rng.random_range(2..=6u32);
            let mut t = Tableau::plus_state(n as usize);
            let mut psi = DenseState::plus_state(n).unwrap();
            for _ in 0..40 {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let gate = match rng.random_range(0..6u8) {
                    0 => Gate::CnotL(a, b),
                    1 => Gate::CnotR(a, b),
                    2 => Gate::Cz(a, b),
                    3 => Gate::Swap(a, b),
                    4 => Gate::H(a),
                    _ => Gate::Measure(a),
                };
                if let Gate::Measure(site) = gate {
                    let want = rng.random::<bool>();
                    let rec = t.composite_measure(site, want).unwrap();
                    // drive the oracle with the outcome the tableau actually used
                    let p = psi.composite_measure(site, rec.outcome).unwrap();
                    if rec.random {
                        assert!((p - 0.5).abs() < 1e-9, "trial {trial}: p={p}");
                    } else {
                        assert!((p - 1.0).abs() < 1e-9);
                    }
                } else {
                    t.apply(&gate).unwrap();
                    psi.apply_gate(&gate).unwrap();
                }
                assert_matches_oracle(&t, &psi);
            }
            t.validate().unwrap();
        }
    }

    #[test]
    fn entropy_matches_oracle_on_hybrid_circuits() {
        for traj in 0..10 {
            let spec = CircuitSpec {
                model: Model::QaCliffordEntanglement,
                length: 8,
                steps: 12,
                rate: 0.2,
                boundary: Boundary::Periodic,
                master_seed: 33,
                trajectory: traj,
            };
            let c = generate_circuit(&spec).unwrap();
            let mut t = Tableau::plus_state(8);
            let mut psi = DenseState::plus_state(8).unwrap();
            t.apply_circuit(&c).unwrap();
            psi.apply_circuit(&c).unwrap();
            for lo in 0..4usize {
                for hi in (lo + 1)..=8usize {
                    let r = Region::range(8, lo, hi);
                    let se = t.renyi_entropy(&r) as f64;
                    let so = psi.renyi2_exact(&r);
                    assert!((se - so).abs() < 1e-8, "traj {traj} region {lo}..{hi}: {se} vs {so}");
                }
            }
        }
    }

    #[test]
    fn prefix_entropies_match_individual_regions() {
        let spec = CircuitSpec {
            model: Model::QaCliffordEntanglement,
            length: 12,
            steps: 20,
            rate: 0.15,
            boundary: Boundary::Periodic,
            master_seed: 5,
            trajectory: 1,
        };
        let c = generate_circuit(&spec).unwrap();
        let mut t = Tableau::plus_state(12);
        t.apply_circuit(&c).unwrap();
        let pre = t.prefix_entropies(12);
        for k in 1..=12usize {
            assert_eq!(pre[k - 1], t.renyi_entropy(&Region::range(12, 0, k)), "k={k}");
        }
    }

    #[test]
    fn entropy_symmetric_under_complement() {
        let spec = CircuitSpec {
            model: Model::NonQaClifford,
            length: 10,
            steps: 15,
            rate: 0.2,
            boundary: Boundary::Periodic,
            master_seed: 77,
            trajectory: 3,
        };
        let c = generate_circuit(&spec).unwrap();
        let mut t = Tableau::plus_state(10);
        t.apply_circuit(&c).unwrap();
        for lo in [0usize, 2, 5] {
            for hi in [6usize, 8, 10] {
                let r = Region::range(10, lo, hi);
                assert_eq!(t.renyi_entropy(&r), t.renyi_entropy(&r.complement()));
            }
        }
        t.validate().unwrap();
    }

    #[test]
    fn mutual_information_basics() {
        let t = Tableau::plus_state(8);
        let a = Region::range(8, 0, 2);
        let b = Region::range(8, 4, 6);
        assert_eq!(t.mutual_information(&a, &b).unwrap(), 0);
        assert!(t.mutual_information(&a, &Region::range(8, 1, 3)).is_err());

        // EPR pair between the two probes: I = 2 per pair
        let mut t = Tableau::plus_state(2);
        t.apply(&Gate::Cz(0, 1)).unwrap();
        let a = Region::range(2, 0, 1);
        let b = Region::range(2, 1, 2);
        assert_eq!(t.mutual_information(&a, &b).unwrap(), 2);
    }
}
