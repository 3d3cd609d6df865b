//! Times a full engine run and writes the resulting table.
//!
//! ```text
//! cargo run --release -p oseq-core --example horizon_timing -- \
//!     <max_d> [plain|compressed] [out.csv] [checkpoint_dir]
//! ```
//!
//! Progress goes to stdout one line per layer so long runs can be watched
//! (or nohup'd) and resumed from the newest checkpoint after interruption.

use std::io::Write as _;

use oseq_core::engine::{
    run_iterative_detailed, CheckpointOptions, EngineOptions, LayerMode, LayerProgress,
};

fn main() {
    let mut args = std::env::args().skip(1);
    let max_d: u32 = args
        .next()
        .expect("usage: horizon_timing <max_d> [plain|compressed] [out.csv] [checkpoint_dir]")
        .parse()
        .expect("max_d must be a positive integer");
    let mode = match args.next().as_deref() {
        None | Some("compressed") => LayerMode::Compressed,
        Some("plain") => LayerMode::Plain,
        Some(other) => panic!("unknown mode {other:?}"),
    };
    let out = args.next();
    let ckpt = args.next();

    let mut opts = EngineOptions {
        mode,
        ..EngineOptions::default()
    };
    if let Some(dir) = ckpt {
        opts.checkpoint = Some(CheckpointOptions::new(dir));
    }
    opts.progress = Some(Box::new(|p: &LayerProgress| {
        println!(
            "p={:5}  layer={:9.3}s  total={:10.1}s  digits(O_p)={}{}",
            p.p,
            p.layer_secs,
            p.total_secs,
            p.o_p.to_string().len(),
            if p.resumed { "  [resumed]" } else { "" }
        );
        let _ = std::io::stdout().flush();
    }));

    let t0 = std::time::Instant::now();
    let (table, stats) = run_iterative_detailed(max_d, &opts).expect("engine run failed");
    println!(
        "done: D={max_d} in {:.1}s (layers computed: {}, resumed from: {:?}, peak resident layers: {})",
        t0.elapsed().as_secs_f64(),
        stats.layers_computed,
        stats.resumed_from,
        stats.peak_resident_layers
    );
    println!("O_{} has {} digits", max_d, table.o(max_d).to_string().len());
    if let Some(path) = out {
        oseq_core::io::emit_od_csv(
            std::path::Path::new(&path),
            table.o_values(),
            Some(table.a_values()),
        )
        .expect("failed to write table");
        println!("wrote {path}");
    }
}
