#include "cbi/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <stdexcept>
#include <thread>

namespace cbi {

ProcessResult run_command(const std::string& command, double timeout_seconds) {
    ProcessResult result;
    int pipefd[2];
    if (pipe(pipefd) != 0) throw std::runtime_error("pipe failed");
    pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw std::runtime_error("fork failed");
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(pipefd[1], STDOUT_FILENO);
        dup2(pipefd[1], STDERR_FILENO);
        close(pipefd[0]);
        close(pipefd[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
        _exit(127);
    }
    close(pipefd[1]);
    fcntl(pipefd[0], F_SETFL, O_NONBLOCK);

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(timeout_seconds > 0 ? timeout_seconds : 1e9);
    bool killed = false;
    bool open = true;
    std::array<char, 4096> buf;
    auto enforce_deadline = [&] {
        if (!killed && timeout_seconds > 0 && std::chrono::steady_clock::now() > deadline) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            killed = true;
            result.timed_out = true;
        }
    };
    while (open) {
        pollfd pfd{pipefd[0], POLLIN, 0};
        poll(&pfd, 1, 50);
        for (;;) {
            ssize_t n = read(pipefd[0], buf.data(), buf.size());
            if (n > 0) {
                result.output.append(buf.data(), static_cast<size_t>(n));
                continue;
            }
            if (n == 0) open = false;                     // EOF
            if (n < 0 && errno != EAGAIN && errno != EINTR) open = false;
            break;
        }
        enforce_deadline();
    }
    close(pipefd[0]);

    int status = 0;
    for (;;) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid || r < 0) break;
        enforce_deadline();
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.signaled = true;
        result.term_signal = WTERMSIG(status);
    }
    return result;
}

}  // namespace cbi
