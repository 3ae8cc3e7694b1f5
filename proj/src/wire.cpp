#include "comte/wire.hpp"

#include <csignal>
#include <cstdio>
#include <mutex>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <thread>

#include <json.hpp>

namespace comte::wire {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void protocol_fail(const std::string& what, const std::string& line) {
  throw Error(ErrorCode::classifier_failure, "external classifier: " + what, line);
}

json parse_reply(const std::string& line, std::uint64_t expected_id) {
  json j;
  try {
    j = json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    protocol_fail("malformed JSON reply", line);
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned())
    protocol_fail("reply without a numeric id", line);
  if (j["id"].get<std::uint64_t>() != expected_id)
    protocol_fail("reply id " + j["id"].dump() + " does not match request id " +
                      std::to_string(expected_id), line);
  if (j.contains("error")) protocol_fail("server error: " + j["error"].dump(), line);
  return j;
}

std::vector<std::string> class_names_of(const json& j, const std::string& line) {
  if (!j.contains("class_names") || !j["class_names"].is_array() || j["class_names"].empty())
    protocol_fail("reply without class_names", line);
  std::vector<std::string> names;
  for (const auto& n : j["class_names"]) {
    if (!n.is_string()) protocol_fail("class names must be strings", line);
    names.push_back(n.get<std::string>());
  }
  return names;
}

}  // namespace

std::string encode_handshake(std::uint64_t id, const MetricSchema& schema) {
  return json{{"id", id}, {"op", "handshake"}, {"metrics", schema.names()}, {"length", schema.length()}}
      .dump();
}

std::string encode_predict(std::uint64_t id, std::span<const MultivariateSample> samples) {
  json batch = json::array();
  for (const auto& s : samples) {
    json rows = json::array();
    for (std::size_t r = 0; r < s.metrics(); ++r) {
      auto row = s.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    batch.push_back(std::move(rows));
  }
  json metrics = samples.empty() ? json::array() : json(samples.front().schema().names());
  return json{{"id", id}, {"op", "predict"}, {"metrics", metrics}, {"samples", batch}}.dump();
}

std::vector<std::string> decode_handshake(const std::string& line, std::uint64_t expected_id) {
  return class_names_of(parse_reply(line, expected_id), line);
}

std::vector<ClassProbabilities> decode_predict(const std::string& line, std::uint64_t expected_id,
                                               std::size_t expected_rows,
                                               const std::vector<std::string>& class_names) {
  const json j = parse_reply(line, expected_id);
  if (j.contains("class_names") && class_names_of(j, line) != class_names)
    protocol_fail("class_names changed after the handshake", line);
  if (!j.contains("probabilities") || !j["probabilities"].is_array())
    protocol_fail("reply without probabilities", line);
  const auto& rows = j["probabilities"];
  if (rows.size() != expected_rows) {
    protocol_fail(std::to_string(rows.size()) + " probability rows for " +
                      std::to_string(expected_rows) + " samples", line);
  }
  std::vector<ClassProbabilities> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != class_names.size())
      protocol_fail("probability row width differs from the class count", line);
    std::vector<double> p;
    for (const auto& v : row) {
      if (!v.is_number()) protocol_fail("non-numeric probability", line);
      p.push_back(v.get<double>());
    }
    try {
      out.push_back(ClassProbabilities::validated(class_names, std::move(p)));
    } catch (const Error& e) {
      protocol_fail(e.what(), line);
    }
  }
  return out;
}

}  // namespace comte::wire

namespace comte {

namespace {

class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command) : command_(command) {
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw Error(ErrorCode::io_error, "pipe() failed");
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw Error(ErrorCode::io_error, "pipe() failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw Error(ErrorCode::io_error, "fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
    fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
    write_fd_ = to_child[1];
    read_ = fdopen(from_child[0], "r");
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    if (write_fd_ >= 0) close(write_fd_);
    if (read_) std::fclose(read_);
    if (pid_ > 0) {
      for (int i = 0; i < 100; ++i) {
        if (waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  /// One request line out, one reply line back.
  std::string round_trip(const std::string& request) {
    std::string payload = request + "\n";
    const char* p = payload.data();
    std::size_t left = payload.size();
    while (left > 0) {
      const ssize_t n = ::write(write_fd_, p, left);
      if (n <= 0) throw Error(ErrorCode::classifier_failure, "external classifier '" + command_ + "' exited", request);
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    std::string line;
    int ch;
    while ((ch = std::fgetc(read_)) != EOF && ch != '\n') line.push_back(static_cast<char>(ch));
    if (ch == EOF && line.empty())
      throw Error(ErrorCode::classifier_failure, "external classifier '" + command_ + "' exited", request);
    return line;
  }

 private:
  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  std::FILE* read_ = nullptr;
};

struct ExternalState {
  std::unique_ptr<ChildProcess> child;
  std::mutex mutex;
  std::uint64_t next_id = 0;
  std::vector<std::string> class_names;

  std::vector<ClassProbabilities> predict(std::span<const MultivariateSample> xs) {
    std::lock_guard lock(mutex);
    const std::uint64_t id = next_id++;
    const std::string reply = child->round_trip(wire::encode_predict(id, xs));
    return wire::decode_predict(reply, id, xs.size(), class_names);
  }
};

}  // namespace

ClassifierHandle external_classifier(const std::string& command, const SchemaPtr& schema) {
  auto state = std::make_shared<ExternalState>();
  state->child = std::make_unique<ChildProcess>(command);
  const std::uint64_t id = state->next_id++;
  const std::string reply = state->child->round_trip(wire::encode_handshake(id, *schema));
  state->class_names = wire::decode_handshake(reply, id);
  return ClassifierHandle(
      state->class_names,
      [state](const MultivariateSample& x) {
        return state->predict(std::span<const MultivariateSample>(&x, 1)).front();
      },
      /*concurrent_safe=*/false,
      [state](std::span<const MultivariateSample> xs) { return state->predict(xs); });
}

}  // namespace comte
