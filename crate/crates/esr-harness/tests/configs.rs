//! The shipped config files must stay byte-for-byte in sync with the
//! compiled defaults, so a run with `--env-config configs/<env>.toml` is
//! the same experiment as a run without one.

use std::path::PathBuf;

use esr_harness::envcfg::{
    fishwood_params, momab_params, random_momdp_params, redeed_params, stock_params,
};
use esr_mcts::envs::{
    BanditParams, FishwoodParams, RandomMomdpParams, RedeedParams, StockParams,
};

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

#[test]
fn fishwood_file_matches_compiled_defaults() {
    let parsed = fishwood_params(Some(&shipped("fishwood.toml"))).unwrap();
    assert_eq!(parsed, FishwoodParams::default());
}

#[test]
fn stock_file_matches_compiled_defaults() {
    let parsed = stock_params(Some(&shipped("stock.toml"))).unwrap();
    assert_eq!(parsed, StockParams::default());
}

#[test]
fn redeed_file_matches_compiled_defaults() {
    let parsed = redeed_params(Some(&shipped("redeed.toml"))).unwrap();
    assert_eq!(parsed, RedeedParams::default());
}

#[test]
fn random_momdp_file_matches_compiled_defaults() {
    let parsed = random_momdp_params(Some(&shipped("random-momdp.toml"))).unwrap();
    assert_eq!(parsed, RandomMomdpParams::default());
}

#[test]
fn momab_file_matches_compiled_defaults() {
    let parsed = momab_params(Some(&shipped("momab.toml"))).unwrap();
    assert_eq!(parsed, BanditParams::default());
}
