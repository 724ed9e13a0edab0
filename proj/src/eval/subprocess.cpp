#include "llmnas/eval/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "llmnas/core/errors.hpp"

namespace llmnas::eval {

namespace {

using Clock = std::chrono::steady_clock;

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw Error(std::string("pipe2: ") + std::strerror(errno));
  return {Fd(fds[0]), Fd(fds[1])};
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

// Appends to `dst`, keeping at most `cap` bytes: the head for stdout, the
// tail for stderr.
void append_capped(std::string& dst, const char* data, std::size_t n, std::size_t cap, bool keep_tail) {
  if (!keep_tail) {
    if (dst.size() < cap) dst.append(data, std::min(n, cap - dst.size()));
    return;
  }
  dst.append(data, n);
  if (dst.size() > cap) dst.erase(0, dst.size() - cap);
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, std::string_view stdin_data,
                          std::chrono::milliseconds timeout, const ProcessOptions& options) {
  if (argv.empty()) throw Error("run_process: empty argv");
  ignore_sigpipe_once();

  auto [in_r, in_w] = make_pipe();
  auto [out_r, out_w] = make_pipe();
  auto [err_r, err_w] = make_pipe();
  auto [exec_r, exec_w] = make_pipe();  // reports exec failure; closes on success

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::signal(SIGPIPE, SIG_DFL);
    ::dup2(in_r.get(), STDIN_FILENO);
    ::dup2(out_w.get(), STDOUT_FILENO);
    ::dup2(err_w.get(), STDERR_FILENO);
    if (options.working_dir && ::chdir(options.working_dir->c_str()) != 0) {
      const int e = errno;
      (void)!::write(exec_w.get(), &e, sizeof e);
      ::_exit(127);
    }
    for (const auto& [k, v] : options.extra_env) ::setenv(k.c_str(), v.c_str(), 1);
    ::execvp(cargv[0], cargv.data());
    const int e = errno;
    (void)!::write(exec_w.get(), &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // also set from the parent to close the race with kill()

  in_r.reset();
  out_w.reset();
  err_w.reset();
  exec_w.reset();

  int exec_errno = 0;
  if (::read(exec_r.get(), &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::waitpid(pid, nullptr, 0);
    throw Error("cannot start '" + argv[0] + "': " + std::strerror(exec_errno));
  }

  set_nonblocking(in_w.get());
  set_nonblocking(out_r.get());
  set_nonblocking(err_r.get());

  ProcessResult result;
  const auto deadline = start + timeout;
  std::size_t written = 0;
  if (stdin_data.empty()) in_w.reset();

  char buf[65536];
  while (out_r || err_r) {
    const auto now = Clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    std::vector<pollfd> fds;
    if (in_w) fds.push_back({in_w.get(), POLLOUT, 0});
    if (out_r) fds.push_back({out_r.get(), POLLIN, 0});
    if (err_r) fds.push_back({err_r.get(), POLLIN, 0});
    const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(wait_ms + 1, 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("poll: ") + std::strerror(errno));
    }
    for (const auto& p : fds) {
      if (p.revents == 0) continue;
      if (in_w && p.fd == in_w.get()) {
        const auto n = ::write(in_w.get(), stdin_data.data() + written, stdin_data.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if ((n < 0 && errno != EAGAIN) || written == stdin_data.size()) in_w.reset();
      } else if (out_r && p.fd == out_r.get()) {
        const auto n = ::read(out_r.get(), buf, sizeof buf);
        if (n > 0) append_capped(result.stdout_text, buf, n, kMaxStdoutBytes, false);
        else if (n == 0 || errno != EAGAIN) out_r.reset();
      } else if (err_r && p.fd == err_r.get()) {
        const auto n = ::read(err_r.get(), buf, sizeof buf);
        if (n > 0) append_capped(result.stderr_text, buf, n, kMaxStderrBytes, true);
        else if (n == 0 || errno != EAGAIN) err_r.reset();
      }
    }
  }
  in_w.reset();

  // Streams are closed (or the deadline passed); wait for the exit status.
  int status = 0;
  bool reaped = false;
  while (!result.timed_out) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) {
      reaped = true;
      break;
    }
    if (w < 0 && errno != EINTR) break;
    if (Clock::now() >= deadline) {
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  // Kill whatever is left of the group, including stray grandchildren.
  ::kill(-pid, SIGKILL);
  if (!reaped) {
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
  }

  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  if (!result.timed_out) {
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) result.term_signal = WTERMSIG(status);
  }
  return result;
}

}  // namespace llmnas::eval
