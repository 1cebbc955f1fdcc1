#pragma once

#include <memory>
#include <string>

#include "parlab/grid.hpp"

namespace parlab {

// Tiny expression grammar for declarative configs:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := number | 'pi' | 'x1' | 'x2' | 't' | 'r' | fn '(' expr ')' | '(' expr ')'
//   fn     := sin | cos | abs | sqrt | exp
// r = |x|. Throws ConfigError on parse failure.
class Expr {
public:
    static Expr parse(const std::string& text);

    double eval(const Vec2& x, double t) const;
    bool depends_on_t() const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace parlab
