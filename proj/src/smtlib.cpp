#include "sobv/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>

#include "sobv/errors.hpp"

extern char** environ;

namespace sobv::smtlib {

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_simple_symbol(const std::string& s) {
  static const std::string kExtra = "~!@$%^&*_-+=<>.?/";
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && kExtra.find(c) == std::string::npos) return false;
  }
  static const char* kReserved[] = {"exists", "forall", "let", "par", "_", "!", "as", "match"};
  for (const char* r : kReserved) {
    if (s == r) return false;
  }
  return true;
}

std::string symbol(const std::string& name) {
  if (is_simple_symbol(name)) return name;
  if (name.find('|') != std::string::npos || name.find('\\') != std::string::npos) {
    throw Error("variable name '" + name + "' cannot be written as an SMT-LIB symbol");
  }
  return "|" + name + "|";
}

std::string sort(const Natural& width) { return "(_ BitVec " + to_decimal(width) + ")"; }

void print_term(const bv::Term& t, std::ostream& os) {
  using bv::Op;
  switch (t.op()) {
    case Op::Const: {
      if (t.width() <= kMaxBinaryLiteralWidth) {
        auto w = static_cast<std::uint64_t>(t.width());
        std::string bits(w, '0');
        for (std::uint64_t i = 0; i < w; ++i) {
          if (boost::multiprecision::bit_test(t.value(), static_cast<unsigned>(i))) bits[w - 1 - i] = '1';
        }
        os << "#b" << bits;
      } else {
        os << "(_ bv" << t.value() << ' ' << t.width() << ')';
      }
      return;
    }
    case Op::Var:
      os << symbol(t.name());
      return;
    case Op::Extract:
      os << "((_ extract " << t.hi() << ' ' << t.lo() << ") ";
      print_term(t.operand(0), os);
      os << ')';
      return;
    case Op::IndexDynamic:
      throw Error("dynamic index node must be lowered before emission");
    default:
      break;
  }
  os << '(' << bv::op_name(t.op());
  for (const auto& k : t.operands()) {
    os << ' ';
    print_term(k, os);
  }
  os << ')';
}

void print_formula(const bv::Formula& f, std::ostream& os) {
  using bv::FKind;
  const char* head = nullptr;
  switch (f.kind()) {
    case FKind::Eq: head = "="; break;
    case FKind::Ule: head = "bvule"; break;
    case FKind::Sle: head = "bvsle"; break;
    case FKind::And: head = "and"; break;
    case FKind::Or: head = "or"; break;
    case FKind::Not: head = "not"; break;
    case FKind::Exists:
    case FKind::Forall:
      os << '(' << (f.kind() == FKind::Exists ? "exists" : "forall") << " (("
         << symbol(f.variable().name) << ' ' << sort(f.variable().width) << ")) ";
      print_formula(f.child(0), os);
      os << ')';
      return;
  }
  os << '(' << head;
  for (const auto& t : f.terms()) {
    os << ' ';
    print_term(t, os);
  }
  for (const auto& c : f.children()) {
    os << ' ';
    print_formula(c, os);
  }
  os << ')';
}

void collect_binders(const bv::Formula& f, std::vector<bv::Variable>& out) {
  if (f.is_quantifier()) out.push_back(f.variable());
  for (const auto& c : f.children()) collect_binders(c, out);
}

}  // namespace

EmittedScript emit_smt2(const bv::Formula& f) {
  bv::require_well_sorted(f);
  EmittedScript s;
  s.logic = "BV";
  collect_binders(f, s.declarations);
  auto free = bv::free_variables(f);

  std::ostringstream os;
  os << "(set-logic " << s.logic << ")\n";
  for (const auto& v : free) os << "(declare-const " << symbol(v.name) << ' ' << sort(v.width) << ")\n";
  os << "(assert\n";
  std::string indent = "  ";
  const bv::Formula* cur = &f;
  std::size_t open = 1;
  while (cur->is_quantifier()) {
    const auto& v = cur->variable();
    os << indent << '(' << (cur->kind() == bv::FKind::Exists ? "exists" : "forall") << " (("
       << symbol(v.name) << ' ' << sort(v.width) << "))\n";
    indent += "  ";
    ++open;
    cur = &cur->child(0);
  }
  os << indent;
  print_formula(*cur, os);
  os << std::string(open, ')') << "\n(check-sat)\n";
  s.text = os.str();
  s.declarations.insert(s.declarations.end(), free.begin(), free.end());
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct SExpr {
  enum class K { List, Symbol, Keyword, Numeral, Binary, Hex, String } kind;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
  std::vector<SExpr> items;

  bool is_symbol(std::string_view s) const { return kind == K::Symbol && text == s; }
};

[[noreturn]] void fail(const std::string& msg, const SExpr& at) {
  throw SyntaxError(msg, at.line, at.column);
}

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip();
    while (i_ < src_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

 private:
  char peek() const { return i_ < src_.size() ? src_[i_] : '\0'; }

  void bump() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < src_.size()) {
      if (src_[i_] == ';') {
        while (i_ < src_.size() && src_[i_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        bump();
      } else {
        break;
      }
    }
  }

  static bool is_symbol_char(char c) {
    static const std::string kExtra = "~!@$%^&*_-+=<>.?/";
    return std::isalnum(static_cast<unsigned char>(c)) || kExtra.find(c) != std::string::npos;
  }

  SExpr read() {
    SExpr e{SExpr::K::Symbol, {}, line_, col_, {}};
    char c = peek();
    if (c == '(') {
      bump();
      e.kind = SExpr::K::List;
      skip();
      while (peek() != ')') {
        if (i_ >= src_.size()) throw SyntaxError("unbalanced '('", e.line, e.column);
        e.items.push_back(read());
        skip();
      }
      bump();
      return e;
    }
    if (c == ')') throw SyntaxError("unexpected ')'", line_, col_);
    if (c == '|') {
      bump();
      while (i_ < src_.size() && peek() != '|') {
        e.text += peek();
        bump();
      }
      if (i_ >= src_.size()) throw SyntaxError("unterminated quoted symbol", e.line, e.column);
      bump();
      return e;
    }
    if (c == '"') {
      e.kind = SExpr::K::String;
      bump();
      while (i_ < src_.size()) {
        if (peek() == '"') {
          bump();
          if (peek() != '"') return e;
        }
        e.text += peek();
        bump();
      }
      throw SyntaxError("unterminated string", e.line, e.column);
    }
    if (c == '#') {
      bump();
      char base = peek();
      if (base != 'b' && base != 'x') throw SyntaxError("expected #b or #x literal", e.line, e.column);
      bump();
      e.kind = base == 'b' ? SExpr::K::Binary : SExpr::K::Hex;
      while (i_ < src_.size() && std::isxdigit(static_cast<unsigned char>(peek()))) {
        e.text += peek();
        bump();
      }
      if (e.text.empty()) throw SyntaxError("empty literal", e.line, e.column);
      if (base == 'b' && e.text.find_first_not_of("01") != std::string::npos) {
        throw SyntaxError("binary literal with non-binary digit", e.line, e.column);
      }
      return e;
    }
    if (c == ':') {
      e.kind = SExpr::K::Keyword;
      bump();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      e.kind = SExpr::K::Numeral;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
        e.text += peek();
        bump();
      }
      return e;
    }
    while (i_ < src_.size() && is_symbol_char(peek())) {
      e.text += peek();
      bump();
    }
    if (e.text.empty() && e.kind == SExpr::K::Symbol) {
      throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }
    return e;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

Natural numeral(const SExpr& e) {
  if (e.kind != SExpr::K::Numeral) fail("expected a numeral", e);
  return *parse_decimal(e.text);
}

Natural parse_sort(const SExpr& e) {
  if (e.kind != SExpr::K::List || e.items.size() != 3 || !e.items[0].is_symbol("_") ||
      !e.items[1].is_symbol("BitVec")) {
    fail("only (_ BitVec n) sorts are supported", e);
  }
  Natural w = numeral(e.items[2]);
  if (w < 1) fail("bit-vector width must be at least 1", e.items[2]);
  return w;
}

const std::map<std::string, bv::Op>& binary_ops() {
  static const std::map<std::string, bv::Op> ops = {
      {"bvadd", bv::Op::Add},   {"bvmul", bv::Op::Mul},   {"bvudiv", bv::Op::Udiv},
      {"bvand", bv::Op::And},   {"bvor", bv::Op::Or},     {"bvxor", bv::Op::Xor},
      {"bvshl", bv::Op::Shl},   {"bvlshr", bv::Op::Lshr}, {"concat", bv::Op::Concat},
  };
  return ops;
}

bool left_associative(bv::Op op) {
  return op == bv::Op::Add || op == bv::Op::Mul || op == bv::Op::And || op == bv::Op::Or ||
         op == bv::Op::Xor;
}

class Builder {
 public:
  void declare(const SExpr& name, Natural width) {
    if (name.kind != SExpr::K::Symbol) fail("expected a symbol", name);
    if (!declared_.emplace(name.text, std::move(width)).second) {
      fail("'" + name.text + "' declared twice", name);
    }
  }

  bv::Term term(const SExpr& e) {
    switch (e.kind) {
      case SExpr::K::Symbol: {
        if (auto it = bound_.find(e.text); it != bound_.end() && !it->second.empty()) {
          return bv::Term::var(e.text, it->second.back());
        }
        if (auto it = declared_.find(e.text); it != declared_.end()) return bv::Term::var(e.text, it->second);
        fail("unknown symbol '" + e.text + "'", e);
      }
      case SExpr::K::Binary: {
        Natural v = 0;
        for (char c : e.text) v = v * 2 + (c - '0');
        return bv::Term::constant(v, e.text.size());
      }
      case SExpr::K::Hex: {
        Natural v = 0;
        for (char c : e.text) {
          int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : std::tolower(c) - 'a' + 10;
          v = v * 16 + d;
        }
        return bv::Term::constant(v, 4 * e.text.size());
      }
      case SExpr::K::List:
        break;
      default:
        fail("unsupported term", e);
    }
    if (e.items.empty()) fail("empty application", e);
    const SExpr& head = e.items[0];
    // (_ bvN w)
    if (head.is_symbol("_")) {
      if (e.items.size() != 3 || e.items[1].kind != SExpr::K::Symbol ||
          e.items[1].text.rfind("bv", 0) != 0) {
        fail("unsupported indexed term", e);
      }
      auto v = parse_decimal(std::string_view(e.items[1].text).substr(2));
      if (!v) fail("malformed bit-vector literal", e.items[1]);
      Natural w = numeral(e.items[2]);
      return bv::Term::constant(*v, w);
    }
    // ((_ extract i j) t)
    if (head.kind == SExpr::K::List) {
      if (head.items.size() == 4 && head.items[0].is_symbol("_") && head.items[1].is_symbol("extract")) {
        if (e.items.size() != 2) fail("extract takes one operand", e);
        return bv::Term::extract(term(e.items[1]), numeral(head.items[2]), numeral(head.items[3]));
      }
      fail("unsupported indexed operator", head);
    }
    if (head.kind != SExpr::K::Symbol) fail("expected an operator", head);
    if (head.text == "bvnot") {
      if (e.items.size() != 2) fail("bvnot takes one operand", e);
      return ~term(e.items[1]);
    }
    auto it = binary_ops().find(head.text);
    if (it == binary_ops().end()) fail("unsupported operation '" + head.text + "'", head);
    bv::Op op = it->second;
    if (e.items.size() < 3 || (e.items.size() > 3 && !left_associative(op))) {
      fail("wrong number of operands for '" + head.text + "'", e);
    }
    bv::Term acc = term(e.items[1]);
    for (std::size_t i = 2; i < e.items.size(); ++i) acc = bv::Term::binary(op, acc, term(e.items[i]));
    return acc;
  }

  bv::Formula formula(const SExpr& e) {
    if (e.kind != SExpr::K::List || e.items.empty() || e.items[0].kind != SExpr::K::Symbol) {
      fail("unsupported formula", e);
    }
    const std::string& head = e.items[0].text;
    auto args = [&](std::size_t n) {
      if (e.items.size() != n + 1) fail("'" + head + "' takes " + std::to_string(n) + " operand(s)", e);
    };
    if (head == "=" || head == "bvule" || head == "bvsle") {
      args(2);
      bv::Term l = term(e.items[1]);
      bv::Term r = term(e.items[2]);
      if (head == "=") return bv::Formula::eq(l, r);
      return head == "bvule" ? bv::Formula::ule(l, r) : bv::Formula::sle(l, r);
    }
    if (head == "not") {
      args(1);
      return bv::Formula::negate(formula(e.items[1]));
    }
    if (head == "and" || head == "or") {
      if (e.items.size() < 2) fail("'" + head + "' needs operands", e);
      bv::Formula acc = formula(e.items[1]);
      for (std::size_t i = 2; i < e.items.size(); ++i) {
        acc = head == "and" ? bv::Formula::conj(acc, formula(e.items[i]))
                            : bv::Formula::disj(acc, formula(e.items[i]));
      }
      return acc;
    }
    if (head == "exists" || head == "forall") {
      args(2);
      const SExpr& binders = e.items[1];
      if (binders.kind != SExpr::K::List || binders.items.empty()) fail("expected a binder list", binders);
      std::vector<bv::Variable> vars;
      for (const auto& b : binders.items) {
        if (b.kind != SExpr::K::List || b.items.size() != 2 || b.items[0].kind != SExpr::K::Symbol) {
          fail("expected (name sort)", b);
        }
        vars.push_back({b.items[0].text, parse_sort(b.items[1])});
      }
      for (const auto& v : vars) bound_[v.name].push_back(v.width);
      bv::Formula body = formula(e.items[2]);
      for (const auto& v : vars) bound_[v.name].pop_back();
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        body = bv::Formula::quantifier(head == "forall", *it, std::move(body));
      }
      return body;
    }
    fail("unsupported formula '" + head + "'", e.items[0]);
  }

 private:
  std::map<std::string, Natural> declared_;
  std::map<std::string, std::vector<Natural>> bound_;
};

}  // namespace

bv::Formula parse_smt2(std::string_view text) {
  Builder b;
  std::optional<bv::Formula> assertion;
  for (const auto& cmd : Reader(text).read_all()) {
    if (cmd.kind != SExpr::K::List || cmd.items.empty() || cmd.items[0].kind != SExpr::K::Symbol) {
      fail("expected a command", cmd);
    }
    const std::string& name = cmd.items[0].text;
    if (name == "set-logic" || name == "set-info" || name == "set-option" || name == "check-sat" ||
        name == "exit") {
      continue;
    }
    if (name == "declare-const") {
      if (cmd.items.size() != 3) fail("declare-const takes a name and a sort", cmd);
      b.declare(cmd.items[1], parse_sort(cmd.items[2]));
    } else if (name == "declare-fun") {
      if (cmd.items.size() != 4 || cmd.items[2].kind != SExpr::K::List || !cmd.items[2].items.empty()) {
        fail("only nullary declare-fun is supported", cmd);
      }
      b.declare(cmd.items[1], parse_sort(cmd.items[3]));
    } else if (name == "assert") {
      if (cmd.items.size() != 2) fail("assert takes one formula", cmd);
      bv::Formula f = b.formula(cmd.items[1]);
      assertion = assertion ? bv::Formula::conj(*assertion, f) : f;
    } else {
      fail("unsupported command '" + name + "'", cmd.items[0]);
    }
  }
  if (!assertion) throw SyntaxError("script has no assertion", 1, 1);
  bv::require_well_sorted(*assertion);
  return *assertion;
}

// ---------------------------------------------------------------------------
// External solver

std::string_view to_string(ExternalVerdict::Result r) {
  switch (r) {
    case ExternalVerdict::Result::Sat: return "sat";
    case ExternalVerdict::Result::Unsat: return "unsat";
    case ExternalVerdict::Result::Unknown: return "unknown";
    case ExternalVerdict::Result::Error: return "error";
  }
  return "?";
}

namespace {

class TempScript {
 public:
  explicit TempScript(const std::string& text) {
    std::string pattern = (std::filesystem::temp_directory_path() / "sobv-XXXXXX.smt2").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    int fd = mkstemps(buf.data(), 5);
    if (fd < 0) throw Error(std::string("cannot create temporary file: ") + std::strerror(errno));
    path_ = buf.data();
    std::size_t done = 0;
    while (done < text.size()) {
      ssize_t n = ::write(fd, text.data() + done, text.size() - done);
      if (n < 0) {
        ::close(fd);
        throw Error(std::string("cannot write temporary file: ") + std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempScript() { std::error_code ec; std::filesystem::remove(path_, ec); }
  TempScript(const TempScript&) = delete;
  TempScript& operator=(const TempScript&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

ExternalVerdict run_external_solver(const EmittedScript& script, const SolverConfig& config) {
  using Clock = std::chrono::steady_clock;
  ExternalVerdict v;
  v.solver = config.executable;
  for (const auto& a : config.arguments) v.solver += " " + a;
  if (config.executable.empty()) {
    v.diagnostic = "no solver executable configured";
    return v;
  }

  TempScript file(script.text);
  std::vector<std::string> argv_storage;
  argv_storage.push_back(config.executable);
  argv_storage.insert(argv_storage.end(), config.arguments.begin(), config.arguments.end());
  argv_storage.push_back(file.path());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  argv.push_back(nullptr);

  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    v.diagnostic = std::string("pipe: ") + std::strerror(errno);
    return v;
  }
  Fd read_end(fds[0]);
  Fd write_end(fds[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, write_end.get(), STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  auto start = Clock::now();
  int rc = posix_spawnp(&pid, config.executable.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  write_end.reset();
  if (rc != 0) {
    v.diagnostic = "cannot start '" + config.executable + "': " + std::strerror(rc);
    return v;
  }

  std::string out;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    auto left = config.timeout - elapsed;
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{read_end.get(), POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) {
      timed_out = true;
      break;
    }
    ssize_t n = ::read(read_end.get(), buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  v.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);

  if (timed_out) {
    v.result = ExternalVerdict::Result::Unknown;
    v.diagnostic = "timed out after " + std::to_string(config.timeout.count()) + " ms";
    return v;
  }
  std::istringstream lines(out);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (!line.empty()) break;
  }
  if (line == "sat") {
    v.result = ExternalVerdict::Result::Sat;
  } else if (line == "unsat") {
    v.result = ExternalVerdict::Result::Unsat;
  } else if (line == "unknown") {
    v.result = ExternalVerdict::Result::Unknown;
  } else {
    v.result = ExternalVerdict::Result::Error;
    if (line.empty()) {
      v.diagnostic = "solver produced no status line";
      if (WIFEXITED(status)) v.diagnostic += " (exit status " + std::to_string(WEXITSTATUS(status)) + ")";
    } else {
      v.diagnostic = "unexpected status line: " + line;
    }
  }
  return v;
}

}  // namespace sobv::smtlib
