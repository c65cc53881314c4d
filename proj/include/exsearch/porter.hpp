#pragma once

#include <cstring>
#include <string>

namespace exsearch {

namespace detail {

// One pass of the classic Porter algorithm (1980), transcribed from the
// reference C implementation including its two published departures
// (bli->ble, logi->log). Operates on lowercase a-z words; the word lives
// in b[0..k] and j marks the candidate stem end.
class porter_state {
public:
    explicit porter_state(std::string word) : b_(std::move(word)), k_(static_cast<int>(b_.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    std::string b_;
    int k_;
    int j_ = 0;

    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !cons(i - 1);
        default:
            return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j].
    int measure() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(int i) const {
        if (i < 1) return false;
        if (b_[static_cast<std::size_t>(i)] != b_[static_cast<std::size_t>(i - 1)]) return false;
        return cons(i);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(const char* s) {
        const int len = static_cast<int>(std::strlen(s));
        if (len > k_ + 1) return false;
        if (b_.compare(static_cast<std::size_t>(k_ - len + 1), static_cast<std::size_t>(len), s) != 0) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(const char* s) {
        b_ = b_.substr(0, static_cast<std::size_t>(j_ + 1)).append(s);
        k_ = static_cast<int>(b_.size()) - 1;
    }

    void replace_if_m(const char* s) {
        if (measure() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (k_ >= 1 && b_[static_cast<std::size_t>(k_ - 1)] != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (measure() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;  // vowel_in_stem implies a non-empty stem, so k_ >= 0
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_cons(k_)) {
                --k_;
                const char ch = b_[static_cast<std::size_t>(k_)];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (measure() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
        case 'a':
            if (ends("ational")) { replace_if_m("ate"); break; }
            if (ends("tional")) { replace_if_m("tion"); break; }
            break;
        case 'c':
            if (ends("enci")) { replace_if_m("ence"); break; }
            if (ends("anci")) { replace_if_m("ance"); break; }
            break;
        case 'e':
            if (ends("izer")) { replace_if_m("ize"); break; }
            break;
        case 'l':
            if (ends("bli")) { replace_if_m("ble"); break; }
            if (ends("alli")) { replace_if_m("al"); break; }
            if (ends("entli")) { replace_if_m("ent"); break; }
            if (ends("eli")) { replace_if_m("e"); break; }
            if (ends("ousli")) { replace_if_m("ous"); break; }
            break;
        case 'o':
            if (ends("ization")) { replace_if_m("ize"); break; }
            if (ends("ation")) { replace_if_m("ate"); break; }
            if (ends("ator")) { replace_if_m("ate"); break; }
            break;
        case 's':
            if (ends("alism")) { replace_if_m("al"); break; }
            if (ends("iveness")) { replace_if_m("ive"); break; }
            if (ends("fulness")) { replace_if_m("ful"); break; }
            if (ends("ousness")) { replace_if_m("ous"); break; }
            break;
        case 't':
            if (ends("aliti")) { replace_if_m("al"); break; }
            if (ends("iviti")) { replace_if_m("ive"); break; }
            if (ends("biliti")) { replace_if_m("ble"); break; }
            break;
        case 'g':
            if (ends("logi")) { replace_if_m("log"); break; }
            break;
        default:
            break;
        }
    }

    void step3() {
        if (k_ < 0) return;
        switch (b_[static_cast<std::size_t>(k_)]) {
        case 'e':
            if (ends("icate")) { replace_if_m("ic"); break; }
            if (ends("ative")) { replace_if_m(""); break; }
            if (ends("alize")) { replace_if_m("al"); break; }
            break;
        case 'i':
            if (ends("iciti")) { replace_if_m("ic"); break; }
            break;
        case 'l':
            if (ends("ical")) { replace_if_m("ic"); break; }
            if (ends("ful")) { replace_if_m(""); break; }
            break;
        case 's':
            if (ends("ness")) { replace_if_m(""); break; }
            break;
        default:
            break;
        }
    }

    void step4() {
        if (k_ < 1) return;
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
        case 'a':
            if (ends("al")) break;
            return;
        case 'c':
            if (ends("ance")) break;
            if (ends("ence")) break;
            return;
        case 'e':
            if (ends("er")) break;
            return;
        case 'i':
            if (ends("ic")) break;
            return;
        case 'l':
            if (ends("able")) break;
            if (ends("ible")) break;
            return;
        case 'n':
            if (ends("ant")) break;
            if (ends("ement")) break;
            if (ends("ment")) break;
            if (ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j_ >= 0 && (b_[static_cast<std::size_t>(j_)] == 's' || b_[static_cast<std::size_t>(j_)] == 't')) break;
            if (ends("ou")) break;
            return;
        case 's':
            if (ends("ism")) break;
            return;
        case 't':
            if (ends("ate")) break;
            if (ends("iti")) break;
            return;
        case 'u':
            if (ends("ous")) break;
            return;
        case 'v':
            if (ends("ive")) break;
            return;
        case 'z':
            if (ends("ize")) break;
            return;
        default:
            return;
        }
        if (measure() > 1) k_ = j_;
    }

    void step5() {
        if (k_ < 0) return;
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            const int a = measure();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (k_ >= 0 && b_[static_cast<std::size_t>(k_)] == 'l' && double_cons(k_) && measure() > 1) --k_;
    }
};

}  // namespace detail

// Single pass of the classic Porter stemmer over a lowercase a-z word.
inline std::string porter_stem(std::string word) {
    return detail::porter_state(std::move(word)).run();
}

// Porter iterated to a fixed point. A single pass is not idempotent for a
// handful of words ("university" -> "univers" -> "univer"); bag-level
// normalization requires a stable form, so normalize() uses this variant.
inline std::string porter_stem_fixpoint(std::string word) {
    for (int pass = 0; pass < 8; ++pass) {
        std::string next = porter_stem(word);
        if (next == word) return word;
        word = std::move(next);
    }
    return word;
}

}  // namespace exsearch
