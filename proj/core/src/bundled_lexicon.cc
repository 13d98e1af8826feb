#include "ecpipe/sentiment.h"

namespace ecpipe {

std::string_view bundled_lexicon_text() {
  return R"LEX(# ecpipe bundled sentiment lexicon.
# Hand-written word lists in a LIWC-like layout. Not a reproduction of any
# proprietary dictionary; point inputs.lexicon at your own for real analyses.

%posemo
good
great
excellent
strong*
improv*
gain*
growth
grow
grew
grown
benefit*
positive*
success*
confident*
optimis*
pleased
happ*
record
robust
outperform*
exceed*
momentum
opportunit*
favorabl*
encourag*
solid
win
wins
winning
best
better

%negemo
bad
weak*
declin*
loss
losses
lost
negative*
poor*
difficult*
challeng*
headwind*
disappoint*
downturn*
fail*
miss
missed
worse
worst
pressure*
slow*
problem*
risk*
impair*
unfavorabl*
concern*

%anx
uncertain*
worr*
nervous*
anxi*
fear*
volatil*
risk*
concern*
unsure
doubt*

%anger
angr*
frustrat*
annoy*
hostil*
dispute*
litigat*
lawsuit*
penalt*
fine
fined

%sad
sad
sadly
disappoint*
unfortunat*
regret*
lose
loss
losses
lost
hurt*
downturn*
declin*

%certain
always
never
definite*
certain
certainly
clearly
clear
absolutely
confident*
committed
sure
undoubted*
total*
completely

%cogproc
think
thought
know*
because
cause*
consider*
believe*
understand*
expect*
reason*
perhaps
maybe
question*
should
would
could
if
whether

%insight
think
thought
know*
consider*
believe*
understand*
realiz*
learn*
insight*
idea*
recogniz*

%cause
because
cause*
effect*
result*
driven
drive*
due
therefore
hence
lead*
impact*

%discrep
should
would
could
want*
need*
hope*
expect*
wish*
lack*
rather
)LEX";
}

}  // namespace ecpipe
