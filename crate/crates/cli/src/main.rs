fn main() {
    std::process::exit(floodsim_cli::run_cli(std::env::args()));
}
