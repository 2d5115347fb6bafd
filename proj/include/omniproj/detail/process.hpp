#pragma once

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace omniproj::detail {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output;  // stdout and stderr combined
};

/// Runs a shell command, capturing combined output, killing the process
/// group after timeout_sec seconds.
inline ProcessResult run_process(const std::string& command, double timeout_sec) {
    ProcessResult res;
    int fds[2];
    if (pipe(fds) != 0) {
        res.output = "pipe failed: " + std::string(std::strerror(errno));
        return res;
    }
    const pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        res.output = "fork failed: " + std::string(std::strerror(errno));
        return res;
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[0]);
        close(fds[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(fds[1]);
    fcntl(fds[0], F_SETFL, O_NONBLOCK);

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
    bool exited = false;
    int status = 0;
    char buf[4096];
    while (true) {
        pollfd pfd{fds[0], POLLIN, 0};
        poll(&pfd, 1, 50);
        while (true) {
            const ssize_t n = read(fds[0], buf, sizeof buf);
            if (n <= 0) break;
            res.output.append(buf, static_cast<size_t>(n));
        }
        if (!exited) {
            const pid_t r = waitpid(pid, &status, WNOHANG);
            if (r == pid) exited = true;
        }
        if (exited && !(pfd.revents & POLLIN)) break;
        if (!exited && std::chrono::steady_clock::now() > deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            res.timed_out = true;
            break;
        }
    }
    close(fds[0]);
    if (res.timed_out)
        res.exit_code = -1;
    else if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else
        res.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    return res;
}

}  // namespace omniproj::detail
