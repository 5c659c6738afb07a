use ionlayer::ccpb::{self, CcpbParams};

struct StderrLog;
impl log::Log for StderrLog {
    fn enabled(&self, _: &log::Metadata) -> bool {
        true
    }
    fn log(&self, record: &log::Record) {
        eprintln!("{}", record.args());
    }
    fn flush(&self) {}
}

static LOGGER: StderrLog = StderrLog;

fn main() {
    log::set_logger(&LOGGER).unwrap();
    log::set_max_level(log::LevelFilter::Trace);
    for (lambda, mu) in [(200.0, 180.0), (200.0, 100.0), (200.0, 20.0), (1e4, 1e3)] {
        let mut params = CcpbParams::new(lambda, mu);
        params.grid_size = 400;
        eprintln!("=== lambda={lambda} mu={mu} ===");
        match ccpb::solve_ccpb(&params) {
            Ok(sol) => eprintln!("OK iters={} a={} b={}", sol.outer_iters, sol.a, sol.b),
            Err(e) => eprintln!("ERR {e}"),
        }
    }
}
