/* bits.c - output bit buffer. */

#include <string.h>

#include "gzip.h"

static unsigned bitbuf;
static int bitcount;

/* Append VALUE with WIDTH bits. */
void
send_bits (unsigned value, int width)
{
  bitbuf |= value << bitcount;
  bitcount += width;
  while (bitcount >= 8)
    {
      bitbuf >>= 8;
      bitcount -= 8;
    }
}

/* Build the fixed trailer bytes. */
void
build_trailer (char *buf, size_t len)
{
  memset (buf, 0, len);
  if (len >= 2)
    {
      buf[0] = (char) (bitbuf & 0xff);
      buf[1] = (char) bitcount;
    }
}
