//! The iteration driver: advance layers, extract counts, checkpoint, resume.
//!
//! Only two layers are ever resident — the one being read and the one being
//! built — and a gauge instruments exactly that so tests can pin it. Every
//! count `O_d` with `d ≤ p` is recoverable from the single layer `p`, which
//! is why a checkpoint holds one layer and nothing else.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use super::coeff::{Coeff, EngineCoeff};
use super::compressed::CompressedLayer;
use super::layer::{col_lo, kmax_for, row_hi, LayerG};
use super::poly::Band;
use super::table::CountTable;
use crate::checkpoint::{peek_header, read_stream, write_atomic, SparseEntry};
use crate::error::{Error, Result};
use crate::BigCount;

/// Layer storage layout. Both produce bit-identical counts; `Compressed`
/// stores the stable diagonal once instead of once per row, cutting memory
/// roughly in half and skipping already-known degrees during builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LayerMode {
    #[default]
    Plain,
    Compressed,
}

#[derive(Debug, Clone)]
pub struct CheckpointOptions {
    /// Directory for `layer_*.ckpt` snapshots; created on first save.
    pub dir: PathBuf,
    /// Snapshot every this many layers (and always at the final one).
    pub every: u32,
    /// How many most-recent snapshots to retain.
    pub keep: usize,
}

impl CheckpointOptions {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CheckpointOptions { dir: dir.into(), every: 25, keep: 2 }
    }
}

/// One completed layer, as reported to the progress callback.
pub struct LayerProgress {
    pub p: u32,
    pub degree_cap: u32,
    /// The newly available count `O_p`.
    pub o_p: BigCount,
    pub layer_secs: f64,
    pub total_secs: f64,
    /// True for the synthetic event fired after loading a checkpoint.
    pub resumed: bool,
}

pub type ProgressFn = Box<dyn Fn(&LayerProgress) + Send + Sync>;

pub struct EngineOptions {
    pub mode: LayerMode,
    /// Worker threads for within-row parallelism; 0 uses the global default.
    /// Counts are exact integers combined in a fixed order, so the thread
    /// count cannot change any result, only the wall time.
    pub threads: usize,
    pub checkpoint: Option<CheckpointOptions>,
    pub progress: Option<ProgressFn>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { mode: LayerMode::Plain, threads: 0, checkpoint: None, progress: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineStats {
    /// Layers advanced in this process (excludes the resumed prefix).
    pub layers_computed: u32,
    /// Layer index a checkpoint restored, if any.
    pub resumed_from: Option<u32>,
    /// High-water mark of simultaneously resident layers.
    pub peak_resident_layers: usize,
}

/// Counts `O_1..=O_max_d` (and the derived `A_d`) by the layered iteration.
pub fn run_iterative(max_d: u32, opts: &EngineOptions) -> Result<CountTable> {
    run_iterative_detailed(max_d, opts).map(|(table, _)| table)
}

/// As [`run_iterative`], also reporting run statistics.
pub fn run_iterative_detailed(max_d: u32, opts: &EngineOptions) -> Result<(CountTable, EngineStats)> {
    if opts.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Domain(format!("failed to build a thread pool: {e}")))?;
        pool.install(|| run_generic::<EngineCoeff>(max_d, opts))
    } else {
        run_generic::<EngineCoeff>(max_d, opts)
    }
}

fn run_generic<C: Coeff>(max_d: u32, opts: &EngineOptions) -> Result<(CountTable, EngineStats)> {
    if max_d == 0 {
        return Err(Error::Domain("the multiplicity horizon must be at least 1".into()));
    }
    let cap = max_d;
    let started = Instant::now();
    let gauge = Arc::new(Gauge::default());
    let mut o: Vec<BigCount> = Vec::with_capacity(cap as usize);
    let mut resumed_from = None;

    let resume_point = match &opts.checkpoint {
        Some(ck) => scan_checkpoints(&ck.dir, cap)?,
        None => None,
    };
    let mut rep = match resume_point {
        Some((p, path)) => {
            let t = Instant::now();
            let rep = Rep::<C>::load(&path, opts.mode, &gauge)?;
            for d in 1..=p {
                o.push(rep.extract_o(d));
            }
            resumed_from = Some(p);
            emit_progress(opts, &LayerProgress {
                p,
                degree_cap: cap,
                o_p: o.last().expect("p >= 1").clone(),
                layer_secs: t.elapsed().as_secs_f64(),
                total_secs: started.elapsed().as_secs_f64(),
                resumed: true,
            });
            rep
        }
        None => {
            let rep = Rep::<C>::init(opts.mode, cap, &gauge)?;
            o.push(rep.extract_o(1));
            emit_progress(opts, &LayerProgress {
                p: 1,
                degree_cap: cap,
                o_p: o[0].clone(),
                layer_secs: 0.0,
                total_secs: started.elapsed().as_secs_f64(),
                resumed: false,
            });
            rep
        }
    };

    let mut layers_computed = 0u32;
    while rep.p() < cap {
        let t = Instant::now();
        rep = rep.step(&gauge);
        let p = rep.p();
        o.push(rep.extract_o(p));
        layers_computed += 1;
        emit_progress(opts, &LayerProgress {
            p,
            degree_cap: cap,
            o_p: o.last().expect("just pushed").clone(),
            layer_secs: t.elapsed().as_secs_f64(),
            total_secs: started.elapsed().as_secs_f64(),
            resumed: false,
        });
        if let Some(ck) = &opts.checkpoint {
            if p % ck.every.max(1) == 0 || p == cap {
                save_checkpoint(&rep, ck)?;
            }
        }
    }

    let table = CountTable::from_o_values(o)?;
    let stats = EngineStats {
        layers_computed,
        resumed_from,
        peak_resident_layers: gauge.peak.load(Ordering::SeqCst),
    };
    Ok((table, stats))
}

fn emit_progress(opts: &EngineOptions, event: &LayerProgress) {
    if let Some(f) = &opts.progress {
        f(event);
    }
}

/// Tracks how many layers are alive at once (loaded, initialized, or under
/// construction); the peak proves the two-layer residency claim in tests.
#[derive(Default)]
struct Gauge {
    cur: AtomicUsize,
    peak: AtomicUsize,
}

impl Gauge {
    fn enter(self: &Arc<Self>) -> Resident {
        let now = self.cur.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        Resident { gauge: Arc::clone(self) }
    }
}

struct Resident {
    gauge: Arc<Gauge>,
}

impl Drop for Resident {
    fn drop(&mut self) {
        self.gauge.cur.fetch_sub(1, Ordering::SeqCst);
    }
}

enum RepKind<C> {
    Plain(LayerG<C>),
    Comp(CompressedLayer<C>),
}

struct Rep<C> {
    kind: RepKind<C>,
    _res: Resident,
}

impl<C: Coeff> Rep<C> {
    fn init(mode: LayerMode, cap: u32, gauge: &Arc<Gauge>) -> Result<Rep<C>> {
        let token = gauge.enter();
        let kind = match mode {
            LayerMode::Plain => RepKind::Plain(LayerG::init_p1(cap)?),
            LayerMode::Compressed => RepKind::Comp(CompressedLayer::init_p1(cap)?),
        };
        Ok(Rep { kind, _res: token })
    }

    fn p(&self) -> u32 {
        match &self.kind {
            RepKind::Plain(l) => l.p,
            RepKind::Comp(c) => c.p,
        }
    }

    fn degree_cap(&self) -> u32 {
        match &self.kind {
            RepKind::Plain(l) => l.degree_cap,
            RepKind::Comp(c) => c.degree_cap,
        }
    }

    fn step(&self, gauge: &Arc<Gauge>) -> Rep<C> {
        // Claim residency before building: source and successor overlap.
        let token = gauge.enter();
        let kind = match &self.kind {
            RepKind::Plain(l) => RepKind::Plain(l.step()),
            RepKind::Comp(c) => RepKind::Comp(c.step()),
        };
        Rep { kind, _res: token }
    }

    fn extract_o(&self, d: u32) -> BigCount {
        match &self.kind {
            RepKind::Plain(l) => l.coeff_big(d - 1, 0, d),
            RepKind::Comp(c) => c.coeff_big(d - 1, 0, d),
        }
    }

    fn save(&self, path: &Path) -> Result<()> {
        match &self.kind {
            RepKind::Plain(layer) => {
                let mut emit = |n: u32, k: u32| -> SparseEntry {
                    match layer.rows[n as usize].get(k as usize) {
                        Some(band) => band
                            .c
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(i, c)| (band.lo + i as u32, c.to_big()))
                            .collect(),
                        None => Vec::new(),
                    }
                };
                write_atomic(path, layer.p, layer.degree_cap, &mut emit)
            }
            RepKind::Comp(comp) => {
                let mut emit = |n: u32, k: u32| comp.entry_sparse(n, k);
                write_atomic(path, comp.p, comp.degree_cap, &mut emit)
            }
        }
    }

    fn load(path: &Path, mode: LayerMode, gauge: &Arc<Gauge>) -> Result<Rep<C>> {
        let (p, cap) = peek_header(path)?;
        let kmax = kmax_for(p, cap);
        let kind = match mode {
            LayerMode::Plain => {
                let mut rows: Vec<Vec<Band<C>>> = Vec::with_capacity(cap as usize);
                let mut sink = |n: u32, k: u32, entry: SparseEntry| -> Result<()> {
                    validate_entry(path, p, cap, n, k, &entry)?;
                    if k == 0 {
                        rows.push(Vec::with_capacity((n.min(kmax) + 1) as usize));
                    }
                    if k <= n.min(kmax) {
                        rows.last_mut().expect("row pushed above").push(band_from_sparse(&entry));
                    }
                    Ok(())
                };
                read_stream(path, &mut sink)?;
                RepKind::Plain(LayerG { p, degree_cap: cap, rows })
            }
            LayerMode::Compressed => {
                let mut z: Vec<Vec<C>> =
                    vec![Vec::with_capacity(cap as usize); (kmax + 1) as usize];
                let mut tails: Vec<Vec<Band<C>>> = Vec::with_capacity(cap as usize);
                let mut sink = |n: u32, k: u32, entry: SparseEntry| -> Result<()> {
                    validate_entry(path, p, cap, n, k, &entry)?;
                    let kcap = n.min(kmax);
                    if k == 0 {
                        tails.push(Vec::with_capacity((kcap + 1) as usize));
                    }
                    if k <= kcap {
                        // Degrees ≤ n must replay the already-committed diagonal.
                        let mut idx = 0usize;
                        for j in 0..n {
                            let expected = &z[k as usize][j as usize];
                            let degree = j + 1;
                            let present =
                                idx < entry.len() && entry[idx].0 == degree;
                            if present {
                                if expected.to_big() != entry[idx].1 {
                                    return Err(Error::Checkpoint(format!(
                                        "{}: entry ({n}, {k}) disagrees with the stable diagonal at degree {degree}",
                                        path.display()
                                    )));
                                }
                                idx += 1;
                            } else if !expected.is_zero() {
                                return Err(Error::Checkpoint(format!(
                                    "{}: entry ({n}, {k}) is missing the stable value at degree {degree}",
                                    path.display()
                                )));
                            }
                        }
                        let diag = if idx < entry.len() && entry[idx].0 == n + 1 {
                            let v = C::from_big(&entry[idx].1);
                            idx += 1;
                            v
                        } else {
                            C::zero()
                        };
                        z[k as usize].push(diag);
                        tails
                            .last_mut()
                            .expect("row pushed above")
                            .push(band_from_sparse(&entry[idx..]));
                    }
                    if k == n {
                        for zcol in z.iter_mut().skip((kcap + 1) as usize) {
                            zcol.push(C::zero());
                        }
                    }
                    Ok(())
                };
                read_stream(path, &mut sink)?;
                RepKind::Comp(CompressedLayer { p, degree_cap: cap, kmax, z, tails })
            }
        };
        Ok(Rep { kind, _res: gauge.enter() })
    }
}

fn band_from_sparse<C: Coeff>(entry: &[(u32, BigCount)]) -> Band<C> {
    let Some(&(lo, _)) = entry.first() else {
        return Band::empty();
    };
    let hi = entry.last().expect("nonempty").0;
    let mut band = Band::with_window(lo, hi);
    for (d, v) in entry {
        band.c[(d - lo) as usize] = C::from_big(v);
    }
    band
}

/// Checks a checkpoint entry against the provable support window for its
/// position — corrupt or foreign data fails here instead of poisoning a run.
fn validate_entry(path: &Path, p: u32, cap: u32, n: u32, k: u32, entry: &[(u32, BigCount)]) -> Result<()> {
    if entry.is_empty() {
        return Ok(());
    }
    let Some(floor) = col_lo(p, k, cap) else {
        return Err(Error::Checkpoint(format!(
            "{}: entry ({n}, {k}) must be empty — its support floor exceeds the cap {cap}",
            path.display()
        )));
    };
    let hi = row_hi(p, n, cap);
    let first = entry.first().expect("nonempty").0;
    let last = entry.last().expect("nonempty").0;
    if first < floor || last > hi {
        return Err(Error::Checkpoint(format!(
            "{}: entry ({n}, {k}) spans degrees [{first}, {last}] outside the provable window [{floor}, {hi}]",
            path.display()
        )));
    }
    Ok(())
}

fn checkpoint_path(dir: &Path, p: u32) -> PathBuf {
    dir.join(format!("layer_{p:05}.ckpt"))
}

/// All `layer_*.ckpt` files in `dir` with their layer indices, validated
/// against the expected degree cap. Ascending by layer index.
fn list_checkpoints(dir: &Path, cap: u32) -> Result<Vec<(u32, PathBuf)>> {
    let mut found = Vec::new();
    if !dir.exists() {
        return Ok(found);
    }
    let iter = fs::read_dir(dir).map_err(|e| Error::io(e, dir))?;
    for item in iter {
        let item = item.map_err(|e| Error::io(e, dir))?;
        let name = item.file_name();
        let Some(name) = name.to_str() else { continue };
        if !(name.starts_with("layer_") && name.ends_with(".ckpt")) {
            continue;
        }
        let path = item.path();
        let (p, d) = peek_header(&path)?;
        if d != cap {
            return Err(Error::Checkpoint(format!(
                "{}: snapshot was taken at degree cap {d}, but this run uses {cap}; \
                 use a separate checkpoint directory per cap or remove the file",
                path.display()
            )));
        }
        if p > cap {
            return Err(Error::Checkpoint(format!(
                "{}: layer index {p} exceeds the degree cap {cap}",
                path.display()
            )));
        }
        found.push((p, path));
    }
    found.sort_by_key(|(p, _)| *p);
    Ok(found)
}

fn scan_checkpoints(dir: &Path, cap: u32) -> Result<Option<(u32, PathBuf)>> {
    Ok(list_checkpoints(dir, cap)?.into_iter().last())
}

fn save_checkpoint<C: Coeff>(rep: &Rep<C>, opts: &CheckpointOptions) -> Result<()> {
    fs::create_dir_all(&opts.dir).map_err(|e| Error::io(e, &opts.dir))?;
    let path = checkpoint_path(&opts.dir, rep.p());
    rep.save(&path)?;
    // Best-effort pruning: a failure to delete old snapshots must not kill
    // a long run.
    if let Ok(all) = list_checkpoints(&opts.dir, rep.degree_cap()) {
        let keep = opts.keep.max(1);
        if all.len() > keep {
            for (_, old) in &all[..all.len() - keep] {
                let _ = fs::remove_file(old);
            }
        }
    }
    Ok(())
}
