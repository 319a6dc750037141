#include <cctype>
#include <string>

#include "kdim/errors.hpp"
#include "kdim/torus.hpp"

namespace kdim {

namespace {

class DescriptorParser {
 public:
  DescriptorParser(std::string_view text, int bits) : text_(text), bits_(bits) {}

  PrecisionReal parse() {
    PrecisionReal value = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return value;
  }

 private:
  PrecisionReal expr() {
    PrecisionReal value = term();
    for (;;) {
      if (consume('+')) {
        value += term();
      } else if (consume('-')) {
        value -= term();
      } else {
        return value;
      }
    }
  }

  PrecisionReal term() {
    PrecisionReal value = unary();
    for (;;) {
      if (consume('*')) {
        value *= unary();
      } else if (consume('/')) {
        PrecisionReal divisor = unary();
        if (divisor.is_zero()) fail("division by zero");
        value /= divisor;
      } else {
        return value;
      }
    }
  }

  PrecisionReal unary() {
    if (consume('-')) return -unary();
    if (consume('+')) return unary();
    return atom();
  }

  PrecisionReal atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      PrecisionReal value = expr();
      expect(')');
      return value;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return named();
    fail(std::string("unexpected character '") + c + "'");
  }

  PrecisionReal number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    // Exponent only when followed by a digit, so "2e" is not swallowed.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    return PrecisionReal::from_decimal(text_.substr(start, pos_ - start), bits_);
  }

  PrecisionReal named() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "golden") {
      PrecisionReal five(std::int64_t{5}, bits_);
      return (PrecisionReal(std::int64_t{1}, bits_) + five.sqrt()) / PrecisionReal(std::int64_t{2}, bits_);
    }
    if (name == "pi") return PrecisionReal::pi(bits_);
    if (name == "e") return PrecisionReal::euler(bits_);
    if (name == "sqrt") {
      expect('(');
      PrecisionReal arg = expr();
      expect(')');
      if (arg.sign() < 0) fail("sqrt of a negative number");
      return arg.sqrt();
    }
    if (name == "zeta") {
      expect('(');
      PrecisionReal arg = expr();
      expect(')');
      if (arg.floor() != arg || arg < PrecisionReal(std::int64_t{2}, bits_)) {
        fail("zeta() takes an integer argument >= 2");
      }
      return PrecisionReal::zeta(static_cast<unsigned long>(arg.floor_int()), bits_);
    }
    fail("unknown name '" + std::string(name) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError("malformed frequency descriptor '" + std::string(text_) + "' at offset " +
                          std::to_string(pos_) + ": " + why);
  }

  std::string_view text_;
  int bits_;
  std::size_t pos_ = 0;
};

}  // namespace

PrecisionReal evaluate_descriptor(std::string_view text, int precision_bits) {
  PrecisionReal value = DescriptorParser(text, precision_bits).parse();
  if (!value.is_finite()) {
    throw ValidationError("frequency descriptor '" + std::string(text) + "' is not finite");
  }
  return value;
}

std::vector<std::string> split_descriptor_list(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current.push_back(c);
    }
  }
  out.push_back(current);
  for (const auto& part : out) {
    if (part.empty()) throw ValidationError("empty entry in list '" + std::string(text) + "'");
  }
  return out;
}

}  // namespace kdim
