#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "ntruknap/errors.hpp"
#include "ntruknap/lattice_embed.hpp"
#include "ntruknap/reduction.hpp"

namespace ntruknap {

namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "ntruknap-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) {
      throw ExternalToolError("cannot create temporary directory", {});
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool replace_all(std::string& s, const std::string& from, const std::string& to) {
  bool any = false;
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
    any = true;
  }
  return any;
}

// Returns the exit status; throws on timeout.
int run_shell(const std::string& command, const fs::path& stdin_path, const fs::path& stdout_path,
              const fs::path& stderr_path, std::chrono::milliseconds timeout) {
  const pid_t pid = fork();
  if (pid < 0) throw ExternalToolError("fork failed", {});
  if (pid == 0) {
    setpgid(0, 0);
    const int in = open(stdin_path.c_str(), O_RDONLY);
    const int out = open(stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const int err = open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (in < 0 || out < 0 || err < 0) _exit(126);
    dup2(in, STDIN_FILENO);
    dup2(out, STDOUT_FILENO);
    dup2(err, STDERR_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw ExternalToolError("waitpid failed", {});
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw ExternalToolError("external reducer timed out after " + std::to_string(timeout.count()) + " ms",
                              read_file(stderr_path));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

bool upper_triangular(const IntMatrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i) {
    if (sgn(b(i, i)) == 0) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (sgn(b(i, j)) != 0) return false;
    }
  }
  return true;
}

// Determinant modulo a word-size prime by Gaussian elimination.
std::uint64_t det_mod(const IntMatrix& m, std::uint64_t p) {
  const std::size_t n = m.rows();
  std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      BigInt r;
      mpz_fdiv_r_ui(r.get_mpz_t(), m(i, j).get_mpz_t(), p);
      a[i][j] = r.get_ui();
    }
  }
  auto mulm = [p](std::uint64_t x, std::uint64_t y) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * y % p);
  };
  auto powm = [&](std::uint64_t x, std::uint64_t e) {
    std::uint64_t acc = 1;
    for (; e; e >>= 1, x = mulm(x, x)) {
      if (e & 1) acc = mulm(acc, x);
    }
    return acc;
  };
  std::uint64_t det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      a[piv].swap(a[c]);
      det = (p - det) % p;
    }
    det = mulm(det, a[c][c]);
    const std::uint64_t inv = powm(a[c][c], p - 2);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      const std::uint64_t f = mulm(a[i][c], inv);
      for (std::size_t j = c; j < n; ++j) a[i][j] = (a[i][j] + p - mulm(f, a[c][j])) % p;
    }
  }
  return det;
}

// Exact up to this dimension; beyond it the determinant is compared modulo
// several large primes.
constexpr std::size_t kExactDeterminantLimit = 200;

}  // namespace

void verify_same_lattice(const IntMatrix& input, const IntMatrix& output, std::size_t spot_checks) {
  if (!input.is_square() || output.rows() != input.rows() || output.cols() != input.cols()) {
    throw IntegrityError("reducer output has different dimensions");
  }
  const std::size_t n = input.rows();
  if (n == 0) return;

  const bool triangular = upper_triangular(input);
  if (n <= kExactDeterminantLimit) {
    if (abs(determinant(input)) != abs(determinant(output))) {
      throw IntegrityError("reducer output has a different determinant");
    }
  } else {
    BigInt det_in = 1;
    if (triangular) {
      for (std::size_t i = 0; i < n; ++i) det_in *= input(i, i);
    }
    std::mt19937_64 gen(0x5eed);
    for (int trial = 0; trial < 6; ++trial) {
      BigInt p;
      do {
        BigInt candidate(static_cast<unsigned long>((gen() >> 2) | (1ULL << 61)));
        mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
      } while (!p.fits_ulong_p());
      const auto pm = p.get_ui();
      std::uint64_t in_mod = 0;
      if (triangular) {
        BigInt r;
        mpz_fdiv_r_ui(r.get_mpz_t(), det_in.get_mpz_t(), pm);
        in_mod = r.get_ui();
      } else {
        in_mod = det_mod(input, pm);
      }
      const std::uint64_t out_mod = det_mod(output, pm);
      if (out_mod != in_mod && out_mod != (pm - in_mod) % pm) {
        throw IntegrityError("reducer output has a different determinant");
      }
    }
  }

  // Rows sampled deterministically across the basis.
  const std::size_t step = std::max<std::size_t>(1, n / std::max<std::size_t>(1, spot_checks));
  for (std::size_t i = 0; i < n; i += step) {
    if (!is_lattice_point(input, output.row(i))) {
      throw IntegrityError("reducer output row " + std::to_string(i) + " is not in the input lattice");
    }
    if (n <= kExactDeterminantLimit && !is_lattice_point(output, input.row(i))) {
      throw IntegrityError("input row " + std::to_string(i) + " is not in the reduced lattice");
    }
  }
}

ReductionRun external_reduce(const IntMatrix& b, const std::string& command, std::chrono::milliseconds timeout) {
  TempDir dir;
  const fs::path in_path = dir.path() / "input.txt";
  const fs::path out_path = dir.path() / "output.txt";
  const fs::path stdout_path = dir.path() / "stdout.txt";
  const fs::path stderr_path = dir.path() / "stderr.txt";
  {
    std::ofstream out(in_path, std::ios::binary);
    out << format_matrix(b);
    if (!out) throw ExternalToolError("cannot write reducer input", {});
  }

  std::string cmd = command;
  const bool uses_in = replace_all(cmd, "{in}", in_path.string());
  const bool uses_out = replace_all(cmd, "{out}", out_path.string());
  const fs::path stdin_path = uses_in ? fs::path("/dev/null") : in_path;

  const auto started = std::chrono::steady_clock::now();
  const int status = run_shell(cmd, stdin_path, stdout_path, stderr_path, timeout);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::string captured = read_file(stderr_path);
  if (status != 0) {
    throw ExternalToolError("external reducer exited with status " + std::to_string(status) + ": " + cmd,
                            captured);
  }
  const std::string text = read_file(uses_out ? out_path : stdout_path);
  IntMatrix reduced;
  try {
    reduced = parse_matrix(text);
  } catch (const ParameterError& e) {
    throw ExternalToolError(std::string("cannot parse reducer output: ") + e.what(), captured);
  }
  verify_same_lattice(b, reduced);

  std::ostringstream log;
  log << "command: " << cmd << "\nseconds: " << seconds << "\nstderr:\n" << captured;
  return ReductionRun{std::move(reduced), log.str()};
}

ExternalReducer::ExternalReducer(std::string command_template, std::chrono::milliseconds timeout)
    : command_(std::move(command_template)), timeout_(timeout) {
  if (command_.empty()) throw ParameterError("ExternalReducer: empty command");
}

ReductionRun ExternalReducer::run(const IntMatrix& basis) const {
  return external_reduce(basis, command_, timeout_);
}

std::shared_ptr<const Reducer> make_reducer(std::string_view spec, const Rational& delta,
                                            std::chrono::milliseconds timeout) {
  if (spec == "internal") return std::make_shared<InternalLllReducer>(delta);
  constexpr std::string_view prefix = "external:";
  if (spec.substr(0, prefix.size()) == prefix) {
    return std::make_shared<ExternalReducer>(std::string(spec.substr(prefix.size())), timeout);
  }
  throw ParameterError("unknown reducer '" + std::string(spec) + "' (expected internal or external:<cmd>)");
}

}  // namespace ntruknap
