fn main() {
    std::process::exit(netpart_bench::cli::main_with_args(std::env::args_os()));
}
