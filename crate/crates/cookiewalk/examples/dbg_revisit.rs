use cookiewalk::env::EnvironmentSpec;
use cookiewalk::exact::{interval_hitting_prob_with_loss, DowncrossOpts};
use std::time::Instant;

fn main() {
    let view = EnvironmentSpec::two_cookie(0.9, 0).unwrap().build().unwrap();
    for anchor in [80i64, 160] {
        let t = Instant::now();
        let opts = DowncrossOpts { initial_cap: Some(256), max_cap: 1 << 13, tail_tol: 1e-9 };
        let (q, lost) = interval_hitting_prob_with_loss(&view, 0, 40, anchor, opts).unwrap();
        println!("anchor {anchor}: q={q:.12} lost={lost:.3e} dt={:?}", t.elapsed());
    }
}
