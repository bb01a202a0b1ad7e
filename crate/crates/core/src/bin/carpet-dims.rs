fn main() {
    carpet_dims::cli::init_thread_pool();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = carpet_dims::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
