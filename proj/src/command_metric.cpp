// SPDX-License-Identifier: Apache-2.0
#include "retro/error.hpp"
#include "retro/metrics.hpp"
#include "retro/text.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace retro {

namespace {

constexpr std::size_t kDetailLimit = 1024;
constexpr std::size_t kTailLimit = 64 * 1024;
constexpr std::size_t kStderrLimit = 512;

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Fd& operator=(Fd&& other) noexcept
    {
        reset(std::exchange(other.fd_, -1));
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return fd_; }
    void reset(int fd = -1)
    {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_ = -1;
};

struct Pipe {
    Fd read, write;
};

Pipe make_pipe()
{
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0)
        throw Error(Errc::exec_failed, fmt::format("pipe: {}", std::strerror(errno)));
    return {Fd(fds[0]), Fd(fds[1])};
}

// Keeps the head (for the detail text) and a bounded tail (for the value line).
struct Capture {
    std::string head;
    std::string tail;
    std::size_t total = 0;

    void add(const char* data, std::size_t n)
    {
        total += n;
        if (head.size() < kDetailLimit)
            head.append(data, std::min(n, kDetailLimit - head.size()));
        tail.append(data, n);
        if (tail.size() > kTailLimit)
            tail.erase(0, tail.size() - kTailLimit);
    }
};

std::optional<double> parse_decimal(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

} // namespace

MetricValue run_command_metric(const std::string& command_line, const std::filesystem::path& workdir,
                               Duration timeout, Timestamp now)
{
    if (!std::filesystem::is_directory(workdir))
        throw Error(Errc::exec_failed, fmt::format("workdir '{}' does not exist", workdir.string()));

    Pipe out = make_pipe();
    Pipe err = make_pipe();
    std::string dir = workdir.string();

    pid_t pid = ::fork();
    if (pid < 0)
        throw Error(Errc::exec_failed, fmt::format("fork: {}", std::strerror(errno)));
    if (pid == 0) {
        // Child: only async-signal-safe calls until exec.
        ::setpgid(0, 0);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0)
            ::dup2(devnull, STDIN_FILENO);
        ::dup2(out.write.get(), STDOUT_FILENO);
        ::dup2(err.write.get(), STDERR_FILENO);
        if (::chdir(dir.c_str()) != 0)
            ::_exit(126);
        ::execl("/bin/sh", "sh", "-c", command_line.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out.write.reset();
    err.write.reset();

    auto deadline = std::chrono::steady_clock::now() + timeout;
    Capture stdout_capture, stderr_capture;
    bool timed_out = false;
    pollfd fds[2] = {{out.read.get(), POLLIN, 0}, {err.read.get(), POLLIN, 0}};
    int open_streams = 2;
    char buf[4096];
    while (open_streams > 0) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        int rc = ::poll(fds, 2, static_cast<int>(std::min<std::int64_t>(left.count(), 1000)));
        if (rc < 0 && errno == EINTR)
            continue;
        if (rc < 0)
            break;
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
            if (n > 0) {
                (i == 0 ? stdout_capture : stderr_capture).add(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EINTR) {
                fds[i].fd = -1;
                --open_streams;
            }
        }
    }

    int status = 0;
    if (timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        throw Error(Errc::exec_timeout,
                    fmt::format("command timed out after {}: {}", format_duration(timeout), command_line));
    }
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    // Leftover background children would otherwise outlive the measurement.
    ::kill(-pid, SIGKILL);

    if (WIFSIGNALED(status))
        throw Error::with_exit_code(128 + WTERMSIG(status),
                                    fmt::format("command killed by signal {}", WTERMSIG(status)));
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code != 0) {
        auto err_text = std::string(text::trim(stderr_capture.head.substr(0, kStderrLimit)));
        throw Error::with_exit_code(code, err_text.empty() ? fmt::format("command exited with code {}", code)
                                                           : fmt::format("command exited with code {}: {}", code, err_text));
    }

    std::string_view last_line;
    for (auto line : text::split_lines(stdout_capture.tail))
        if (!text::trim(line).empty())
            last_line = text::trim(line);
    auto value = parse_decimal(last_line);
    if (!value)
        throw Error(Errc::output_not_numeric, fmt::format("output is not numeric: '{}'", last_line));

    MetricValue result;
    result.value = *value;
    result.evaluated_at = now;
    result.detail = stdout_capture.head;
    if (stdout_capture.total > stdout_capture.head.size())
        result.detail += "...";
    return result;
}

} // namespace retro
