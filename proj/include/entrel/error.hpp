#ifndef ENTREL_ERROR_HPP
#define ENTREL_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entrel {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(std::size_t byte_offset)
      : Error("invalid UTF-8 at byte " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class EmptyDocument : public Error {
 public:
  explicit EmptyDocument(const std::string& doc_id)
      : Error("document '" + doc_id + "' has no non-whitespace content") {}
};

// Malformed line in a line-oriented resource (dictionary, gold file, ...).
class FormatError : public Error {
 public:
  FormatError(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateCanonical : public Error {
 public:
  explicit DuplicateCanonical(const std::string& name)
      : Error("duplicate canonical entry '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line_no, const std::string& what)
      : Error("grammar line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DanglingSubgraph : public Error {
 public:
  explicit DanglingSubgraph(const std::string& name)
      : Error("call to undefined subgraph '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class NoEntryPoint : public Error {
 public:
  NoEntryPoint() : Error("grammar declares no entry point") {}
};

class RecursionLimit : public Error {
 public:
  explicit RecursionLimit(const std::string& graph)
      : Error("subgraph nesting limit exceeded in '" + graph + "' (cyclic grammar?)") {}
};

class ArityUnsupported : public Error {
 public:
  explicit ArityUnsupported(std::size_t n)
      : Error("contextual extraction needs exactly 3 category tags, got " + std::to_string(n)) {}
};

class TagSequenceError : public Error {
 public:
  TagSequenceError(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class NoDates : public Error {
 public:
  NoDates() : Error("no dated relation rows in scope") {}
};

class TooManySets : public Error {
 public:
  explicit TooManySets(std::size_t n)
      : Error("venn regions support at most 4 target sets, got " + std::to_string(n)) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace entrel

#endif  // ENTREL_ERROR_HPP
