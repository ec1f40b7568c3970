// Double metaphone phonetic encoding, following Lawrence Philips' original
// rule set (C/C++ Users Journal, June 2000).

#include <algorithm>
#include <cctype>
#include <initializer_list>

#include "provlink/analyzers.hpp"

namespace provlink {

namespace {

class Encoder {
 public:
  explicit Encoder(std::string_view word) {
    word_.reserve(word.size() + 5);
    for (char c : word) {
      word_.push_back(char(std::toupper(static_cast<unsigned char>(c))));
    }
    length_ = int(word_.size());
    last_ = length_ - 1;
    // Pad so lookahead past the end reads spaces.
    word_.append(5, ' ');
  }

  PhoneticCode run(std::size_t max_length);

 private:
  char at(int pos) const {
    if (pos < 0 || pos >= int(word_.size())) return '\0';
    return word_[std::size_t(pos)];
  }

  bool string_at(int start, int len, std::initializer_list<std::string_view> options) const {
    if (start < 0) return false;
    if (std::size_t(start) + std::size_t(len) > word_.size()) return false;
    std::string_view sub(word_.data() + start, std::size_t(len));
    return std::find(options.begin(), options.end(), sub) != options.end();
  }

  bool is_vowel(int pos) const {
    if (pos < 0 || pos >= length_) return false;
    switch (word_[std::size_t(pos)]) {
      case 'A': case 'E': case 'I': case 'O': case 'U': case 'Y':
        return true;
      default:
        return false;
    }
  }

  bool slavo_germanic() const {
    std::string_view w(word_.data(), std::size_t(length_));
    return w.find('W') != w.npos || w.find('K') != w.npos ||
           w.find("CZ") != w.npos || w.find("WITZ") != w.npos;
  }

  void add(std::string_view main) {
    primary_ += main;
    secondary_ += main;
  }

  void add(std::string_view main, std::string_view alt) {
    primary_ += main;
    if (!alt.empty()) {
      alternate_ = true;
      if (alt[0] != ' ') secondary_ += alt;
    } else if (!main.empty() && main[0] != ' ') {
      secondary_ += main;
    }
  }

  int handle_c(int cur);
  int handle_g(int cur);
  int handle_j(int cur);
  int handle_s(int cur);
  int handle_t(int cur);
  int handle_w(int cur);

  std::string word_;
  int length_ = 0;
  int last_ = 0;
  std::string primary_;
  std::string secondary_;
  bool alternate_ = false;
};

int Encoder::handle_c(int cur) {
  // Germanic "ach", e.g. "bacher", "macher".
  if (cur > 1 && !is_vowel(cur - 2) && string_at(cur - 1, 3, {"ACH"}) &&
      at(cur + 2) != 'I' &&
      (at(cur + 2) != 'E' || string_at(cur - 2, 6, {"BACHER", "MACHER"}))) {
    add("K");
    return cur + 2;
  }
  if (cur == 0 && string_at(cur, 6, {"CAESAR"})) {
    add("S");
    return cur + 2;
  }
  if (string_at(cur, 4, {"CHIA"})) {  // "chianti"
    add("K");
    return cur + 2;
  }
  if (string_at(cur, 2, {"CH"})) {
    if (cur > 0 && string_at(cur, 4, {"CHAE"})) {  // "michael"
      add("K", "X");
      return cur + 2;
    }
    // Greek roots, e.g. "chemistry", "chorus".
    if (cur == 0 &&
        (string_at(cur + 1, 5, {"HARAC", "HARIS"}) ||
         string_at(cur + 1, 3, {"HOR", "HYM", "HIA", "HEM"})) &&
        !string_at(0, 5, {"CHORE"})) {
      add("K");
      return cur + 2;
    }
    if (string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"}) ||
        string_at(cur - 2, 6, {"ORCHES", "ARCHIT", "ORCHID"}) ||
        string_at(cur + 2, 1, {"T", "S"}) ||
        ((string_at(cur - 1, 1, {"A", "O", "U", "E"}) || cur == 0) &&
         string_at(cur + 2, 1, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}))) {
      add("K");
    } else if (cur > 0) {
      if (string_at(0, 2, {"MC"})) {
        add("K");
      } else {
        add("X", "K");
      }
    } else {
      add("X");
    }
    return cur + 2;
  }
  if (string_at(cur, 2, {"CZ"}) && !string_at(cur - 2, 4, {"WICZ"})) {  // "czerny"
    add("S", "X");
    return cur + 2;
  }
  if (string_at(cur + 1, 3, {"CIA"})) {  // "focaccia"
    add("X");
    return cur + 3;
  }
  // Double C, but not "McClellan".
  if (string_at(cur, 2, {"CC"}) && !(cur == 1 && at(0) == 'M')) {
    if (string_at(cur + 2, 1, {"I", "E", "H"}) && !string_at(cur + 2, 2, {"HU"})) {
      if ((cur == 1 && at(cur - 1) == 'A') || string_at(cur - 1, 5, {"UCCEE", "UCCES"})) {
        add("KS");  // "accident", "succeed"
      } else {
        add("X");  // "bacci", "bertucci"
      }
      return cur + 3;
    }
    add("K");  // Pierce's rule
    return cur + 2;
  }
  if (string_at(cur, 2, {"CK", "CG", "CQ"})) {
    add("K");
    return cur + 2;
  }
  if (string_at(cur, 2, {"CI", "CE", "CY"})) {
    if (string_at(cur, 3, {"CIO", "CIE", "CIA"})) {
      add("S", "X");
    } else {
      add("S");
    }
    return cur + 2;
  }
  add("K");
  if (string_at(cur + 1, 2, {" C", " Q", " G"})) return cur + 3;  // "mac caffrey"
  if (string_at(cur + 1, 1, {"C", "K", "Q"}) && !string_at(cur + 1, 2, {"CE", "CI"})) {
    return cur + 2;
  }
  return cur + 1;
}

int Encoder::handle_g(int cur) {
  if (at(cur + 1) == 'H') {
    if (cur > 0 && !is_vowel(cur - 1)) {
      add("K");
      return cur + 2;
    }
    if (cur == 0) {  // "ghislane", "ghiradelli"
      add(at(cur + 2) == 'I' ? "J" : "K");
      return cur + 2;
    }
    // Parker's rule, e.g. "hugh", "bough", "broughton".
    if ((cur > 1 && string_at(cur - 2, 1, {"B", "H", "D"})) ||
        (cur > 2 && string_at(cur - 3, 1, {"B", "H", "D"})) ||
        (cur > 3 && string_at(cur - 4, 1, {"B", "H"}))) {
      return cur + 2;
    }
    // "laugh", "mclaughlin", "cough", "gough", "rough", "tough"
    if (cur > 2 && at(cur - 1) == 'U' && string_at(cur - 3, 1, {"C", "G", "L", "R", "T"})) {
      add("F");
    } else if (cur > 0 && at(cur - 1) != 'I') {
      add("K");
    }
    return cur + 2;
  }
  if (at(cur + 1) == 'N') {
    if (cur == 1 && is_vowel(0) && !slavo_germanic()) {
      add("KN", "N");
    } else if (!string_at(cur + 2, 2, {"EY"}) && at(cur + 1) != 'Y' && !slavo_germanic()) {
      add("N", "KN");
    } else {
      add("KN");
    }
    return cur + 2;
  }
  if (string_at(cur + 1, 2, {"LI"}) && !slavo_germanic()) {  // "tagliaro"
    add("KL", "L");
    return cur + 2;
  }
  // -ges-, -gep-, -gel-, -gie- at the beginning
  if (cur == 0 &&
      (at(cur + 1) == 'Y' ||
       string_at(cur + 1, 2, {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"}))) {
    add("K", "J");
    return cur + 2;
  }
  // -ger-, -gy-
  if ((string_at(cur + 1, 2, {"ER"}) || at(cur + 1) == 'Y') &&
      !string_at(0, 6, {"DANGER", "RANGER", "MANGER"}) &&
      !string_at(cur - 1, 1, {"E", "I"}) && !string_at(cur - 1, 3, {"RGY", "OGY"})) {
    add("K", "J");
    return cur + 2;
  }
  // Italian, e.g. "biaggi"
  if (string_at(cur + 1, 1, {"E", "I", "Y"}) || string_at(cur - 1, 4, {"AGGI", "OGGI"})) {
    if (string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"}) ||
        string_at(cur + 1, 2, {"ET"})) {
      add("K");
    } else if (string_at(cur + 1, 4, {"IER "})) {
      add("J");
    } else {
      add("J", "K");
    }
    return cur + 2;
  }
  add("K");
  return at(cur + 1) == 'G' ? cur + 2 : cur + 1;
}

int Encoder::handle_j(int cur) {
  // Spanish, "jose", "san jacinto"
  if (string_at(cur, 4, {"JOSE"}) || string_at(0, 4, {"SAN "})) {
    if ((cur == 0 && at(cur + 4) == ' ') || string_at(0, 4, {"SAN "})) {
      add("H");
    } else {
      add("J", "H");
    }
    return cur + 1;
  }
  if (cur == 0 && !string_at(cur, 4, {"JOSE"})) {
    add("J", "A");  // "yankelovich" / "jankelowicz"
  } else if (is_vowel(cur - 1) && !slavo_germanic() && (at(cur + 1) == 'A' || at(cur + 1) == 'O')) {
    add("J", "H");  // "bajador"
  } else if (cur == last_) {
    add("J", " ");
  } else if (!string_at(cur + 1, 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) &&
             !string_at(cur - 1, 1, {"S", "K", "L"})) {
    add("J");
  }
  return at(cur + 1) == 'J' ? cur + 2 : cur + 1;
}

int Encoder::handle_s(int cur) {
  if (string_at(cur - 1, 3, {"ISL", "YSL"})) return cur + 1;  // "island", "carlisle"
  if (cur == 0 && string_at(cur, 5, {"SUGAR"})) {
    add("X", "S");
    return cur + 1;
  }
  if (string_at(cur, 2, {"SH"})) {
    if (string_at(cur + 1, 4, {"HEIM", "HOEK", "HOLM", "HOLZ"})) {
      add("S");
    } else {
      add("X");
    }
    return cur + 2;
  }
  // Italian and Armenian
  if (string_at(cur, 3, {"SIO", "SIA"}) || string_at(cur, 4, {"SIAN"})) {
    if (!slavo_germanic()) {
      add("S", "X");
    } else {
      add("S");
    }
    return cur + 3;
  }
  // "smith" matches "schmidt", "snider" matches "schneider"; also -sz-.
  if ((cur == 0 && string_at(cur + 1, 1, {"M", "N", "L", "W"})) || string_at(cur + 1, 1, {"Z"})) {
    add("S", "X");
    return string_at(cur + 1, 1, {"Z"}) ? cur + 2 : cur + 1;
  }
  if (string_at(cur, 2, {"SC"})) {
    if (at(cur + 2) == 'H') {  // Schlesinger's rule
      if (string_at(cur + 3, 2, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
        if (string_at(cur + 3, 2, {"ER", "EN"})) {
          add("X", "SK");  // "schermerhorn", "schenker"
        } else {
          add("SK");  // "school", "schooner"
        }
        return cur + 3;
      }
      if (cur == 0 && !is_vowel(3) && at(3) != 'W') {
        add("X", "S");
      } else {
        add("X");
      }
      return cur + 3;
    }
    if (string_at(cur + 2, 1, {"I", "E", "Y"})) {
      add("S");
      return cur + 3;
    }
    add("SK");
    return cur + 3;
  }
  // French, e.g. "resnais", "artois"
  if (cur == last_ && string_at(cur - 2, 2, {"AI", "OI"})) {
    add("", "S");
  } else {
    add("S");
  }
  return string_at(cur + 1, 1, {"S", "Z"}) ? cur + 2 : cur + 1;
}

int Encoder::handle_t(int cur) {
  if (string_at(cur, 4, {"TION"})) {
    add("X");
    return cur + 3;
  }
  if (string_at(cur, 3, {"TIA", "TCH"})) {
    add("X");
    return cur + 3;
  }
  if (string_at(cur, 2, {"TH"}) || string_at(cur, 3, {"TTH"})) {
    if (string_at(cur + 2, 2, {"OM", "AM"}) || string_at(0, 4, {"VAN ", "VON "}) ||
        string_at(0, 3, {"SCH"})) {
      add("T");  // "thomas", "thames"
    } else {
      add("0", "T");
    }
    return cur + 2;
  }
  add("T");
  return string_at(cur + 1, 1, {"T", "D"}) ? cur + 2 : cur + 1;
}

int Encoder::handle_w(int cur) {
  if (string_at(cur, 2, {"WR"})) {
    add("R");
    return cur + 2;
  }
  if (cur == 0 && (is_vowel(cur + 1) || string_at(cur, 2, {"WH"}))) {
    if (is_vowel(cur + 1)) {
      add("A", "F");  // "wasserman" / "vasserman"
    } else {
      add("A");  // "uomo" / "womo"
    }
  }
  // "arnow" matches "arnoff"
  if ((cur == last_ && is_vowel(cur - 1)) ||
      string_at(cur - 1, 5, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) || string_at(0, 3, {"SCH"})) {
    add("", "F");
    return cur + 1;
  }
  if (string_at(cur, 4, {"WICZ", "WITZ"})) {  // "filipowicz"
    add("TS", "FX");
    return cur + 4;
  }
  return cur + 1;
}

PhoneticCode Encoder::run(std::size_t max_length) {
  if (length_ < 1) return {};
  int cur = 0;
  if (string_at(0, 2, {"GN", "KN", "PN", "WR", "PS"})) cur += 1;
  if (at(0) == 'X') {  // "xavier"
    add("S");
    cur += 1;
  }

  while ((primary_.size() < max_length || secondary_.size() < max_length) && cur < length_) {
    switch (at(cur)) {
      case 'A': case 'E': case 'I': case 'O': case 'U': case 'Y':
        if (cur == 0) add("A");
        cur += 1;
        break;
      case 'B':
        add("P");
        cur += at(cur + 1) == 'B' ? 2 : 1;
        break;
      case 'C':
        cur = handle_c(cur);
        break;
      case 'D':
        if (string_at(cur, 2, {"DG"})) {
          if (string_at(cur + 2, 1, {"I", "E", "Y"})) {
            add("J");  // "edge"
            cur += 3;
          } else {
            add("TK");  // "edgar"
            cur += 2;
          }
        } else if (string_at(cur, 2, {"DT", "DD"})) {
          add("T");
          cur += 2;
        } else {
          add("T");
          cur += 1;
        }
        break;
      case 'F':
        cur += at(cur + 1) == 'F' ? 2 : 1;
        add("F");
        break;
      case 'G':
        cur = handle_g(cur);
        break;
      case 'H':
        // Kept only when initial or between vowels, before a vowel.
        if ((cur == 0 || is_vowel(cur - 1)) && is_vowel(cur + 1)) {
          add("H");
          cur += 2;
        } else {
          cur += 1;
        }
        break;
      case 'J':
        cur = handle_j(cur);
        break;
      case 'K':
        cur += at(cur + 1) == 'K' ? 2 : 1;
        add("K");
        break;
      case 'L':
        if (at(cur + 1) == 'L') {
          // Spanish, e.g. "cabrillo", "gallegos"
          if ((cur == length_ - 3 && string_at(cur - 1, 4, {"ILLO", "ILLA", "ALLE"})) ||
              ((string_at(last_ - 1, 2, {"AS", "OS"}) || string_at(last_, 1, {"A", "O"})) &&
               string_at(cur - 1, 4, {"ALLE"}))) {
            add("L", " ");
            cur += 2;
            break;
          }
          cur += 2;
        } else {
          cur += 1;
        }
        add("L");
        break;
      case 'M':
        // "dumb", "thumb"
        if ((string_at(cur - 1, 3, {"UMB"}) &&
             (cur + 1 == last_ || string_at(cur + 2, 2, {"ER"}))) ||
            at(cur + 1) == 'M') {
          cur += 2;
        } else {
          cur += 1;
        }
        add("M");
        break;
      case 'N':
        cur += at(cur + 1) == 'N' ? 2 : 1;
        add("N");
        break;
      case 'P':
        if (at(cur + 1) == 'H') {
          add("F");
          cur += 2;
          break;
        }
        cur += string_at(cur + 1, 1, {"P", "B"}) ? 2 : 1;  // "campbell", "raspberry"
        add("P");
        break;
      case 'Q':
        cur += at(cur + 1) == 'Q' ? 2 : 1;
        add("K");
        break;
      case 'R':
        // French "rogier", but not "hochmeier"
        if (cur == last_ && !slavo_germanic() && string_at(cur - 2, 2, {"IE"}) &&
            !string_at(cur - 4, 2, {"ME", "MA"})) {
          add("", "R");
        } else {
          add("R");
        }
        cur += at(cur + 1) == 'R' ? 2 : 1;
        break;
      case 'S':
        cur = handle_s(cur);
        break;
      case 'T':
        cur = handle_t(cur);
        break;
      case 'V':
        cur += at(cur + 1) == 'V' ? 2 : 1;
        add("F");
        break;
      case 'W':
        cur = handle_w(cur);
        break;
      case 'X':
        // French, e.g. "breaux"
        if (!(cur == last_ &&
              (string_at(cur - 3, 3, {"IAU", "EAU"}) || string_at(cur - 2, 2, {"AU", "OU"})))) {
          add("KS");
        }
        cur += string_at(cur + 1, 1, {"C", "X"}) ? 2 : 1;
        break;
      case 'Z':
        if (at(cur + 1) == 'H') {  // pinyin, e.g. "zhao"
          add("J");
          cur += 2;
          break;
        }
        if (string_at(cur + 1, 2, {"ZO", "ZI", "ZA"}) ||
            (slavo_germanic() && cur > 0 && at(cur - 1) != 'T')) {
          add("S", "TS");
        } else {
          add("S");
        }
        cur += at(cur + 1) == 'Z' ? 2 : 1;
        break;
      default:
        cur += 1;
    }
  }

  PhoneticCode out;
  out.primary = primary_.substr(0, max_length);
  out.alternate = alternate_ ? secondary_.substr(0, max_length) : out.primary;
  return out;
}

}  // namespace

PhoneticCode double_metaphone(std::string_view word, std::size_t max_length) {
  bool has_letter = std::any_of(word.begin(), word.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  });
  if (!has_letter) return {};
  return Encoder(word).run(max_length);
}

bool PhoneticCode::intersects(const PhoneticCode& other) const {
  auto hit = [](const std::string& a, const std::string& b) { return !a.empty() && a == b; };
  return hit(primary, other.primary) || hit(primary, other.alternate) ||
         hit(alternate, other.primary) || hit(alternate, other.alternate);
}

}  // namespace provlink
