fn main() {
    env_logger::init();
    let code = mtlab::cli_io::run_command(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
