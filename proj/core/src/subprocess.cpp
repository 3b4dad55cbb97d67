#include "pyrtex/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <string>
#include <thread>

#include "pyrtex/errors.hpp"
#include "pyrtex/image_io.hpp"
#include "pyrtex/rng.hpp"

namespace fs = std::filesystem;

namespace pyrtex {

namespace {

std::string substitute(const std::string& tmpl, const std::string& key,
                       const std::string& value) {
    std::string out = tmpl;
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
        out.replace(pos, key.size(), value);
        pos += value.size();
    }
    return out;
}

// Unique per-invocation scratch directory, removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<uint64_t> counter{0};
        const uint64_t tag = splitmix64(
            static_cast<uint64_t>(::getpid()) ^
            (counter.fetch_add(1) << 24) ^
            static_cast<uint64_t>(
                std::chrono::steady_clock::now().time_since_epoch().count()));
        char name[64];
        std::snprintf(name, sizeof(name), "pyrtex-%016llx",
                      static_cast<unsigned long long>(tag));
        path_ = fs::temp_directory_path() / name;
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Runs via /bin/sh -c; kills the whole process group on timeout.
int run_with_timeout(const std::string& command, double timeout_seconds) {
    const pid_t pid = ::fork();
    if (pid < 0) throw ExternalToolError("fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    const auto deadline =
        std::chrono::steady_clock::now() +
        std::chrono::milliseconds(static_cast<long>(timeout_seconds * 1000.0));
    int status = 0;
    for (;;) {
        const pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0) throw ExternalToolError("waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            throw ExternalToolError("external command timed out after " +
                                    std::to_string(timeout_seconds) + " s: " + command);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (WIFSIGNALED(status)) {
        throw ExternalToolError("external command killed by signal " +
                                std::to_string(WTERMSIG(status)) + ": " + command);
    }
    return WEXITSTATUS(status);
}

}  // namespace

Image run_external_image_command(const std::string& command_template, const Image& input,
                                 double timeout_seconds) {
    if (command_template.find("{in}") == std::string::npos ||
        command_template.find("{out}") == std::string::npos) {
        throw ConfigError("external command template must contain {in} and {out}: " +
                          command_template);
    }

    TempDir dir;
    const std::string in_path = (dir.path() / "in.png").string();
    const std::string out_path = (dir.path() / "out.png").string();
    save_image(input, in_path);

    const std::string command =
        substitute(substitute(command_template, "{in}", in_path), "{out}", out_path);
    const int exit_code = run_with_timeout(command, timeout_seconds);
    if (exit_code != 0) {
        throw ExternalToolError("external command exited with code " +
                                std::to_string(exit_code) + ": " + command);
    }
    if (!fs::exists(out_path)) {
        throw ExternalToolError("external command produced no output file: " + command);
    }
    try {
        return load_image(out_path);
    } catch (const Error& e) {
        throw ExternalToolError(std::string("external command output unreadable: ") +
                                e.what());
    }
}

}  // namespace pyrtex
