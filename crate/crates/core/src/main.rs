fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PIXELARENA_LOG", "warn")).init();
    std::process::exit(pixelarena::cli::main_with_args(std::env::args_os()));
}
