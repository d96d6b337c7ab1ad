use evidenza::bench::{replicate, ExperimentConfig};

#[test]
fn expgrid_diag() {
    for seed in [0u64, 1, 2] {
        let mut rect = ExperimentConfig::new("gaussgauss", "expgrid-rect");
        rect.seed = seed; // m=1000, n=20
        let rr = replicate(&rect).unwrap();
        let mut trap = ExperimentConfig::new("gaussgauss", "expgrid-riemann");
        trap.seed = seed;
        let rt = replicate(&trap).unwrap();
        println!("seed {seed}:");
        println!("  eg-rect mean {:.7} rmse {:.7} mape {:.7}  (paper nested-rect .1037008 .0090824 .0583018)", rr.mean_z, rr.rmse.unwrap(), rr.mape.unwrap());
        println!("  eg-riem mean {:.7} rmse {:.7} mape {:.7}  (paper nested-riem .1042196 .0091383 .0583487)", rt.mean_z, rt.rmse.unwrap(), rt.mape.unwrap());
    }
}
