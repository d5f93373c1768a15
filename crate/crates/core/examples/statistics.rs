//! Paired t-test and Cohen's d on per-run means.

use siga::stats::{cohens_d, mean, paired_t_test};

fn main() {
    let xsiga = [0.61, 0.58, 0.60, 0.57, 0.59, 0.62, 0.58, 0.60];
    let nsiga = [0.34, 0.33, 0.35, 0.31, 0.33, 0.36, 0.32, 0.34];
    let t = paired_t_test(&xsiga, &nsiga).unwrap();
    println!("means {:.3} vs {:.3}", mean(&xsiga), mean(&nsiga));
    println!("t = {:.3}, two-sided p = {:.3e}, d = {:.2}", t.t, t.p, cohens_d(&xsiga, &nsiga).unwrap());

    let same = paired_t_test(&xsiga, &xsiga).unwrap();
    println!("identical samples: t = {}, p = {}, d = {}", same.t, same.p, cohens_d(&xsiga, &xsiga).unwrap());

    match cohens_d(&[1.0, 1.0], &[2.0, 2.0]) {
        Ok(d) => println!("d = {d}"),
        Err(e) => println!("constant samples: {e}"),
    }
}
