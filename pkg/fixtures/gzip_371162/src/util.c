/* util.c - error reporting and checked wrappers. */

#include <fcntl.h>
#include <unistd.h>
#include <stdio.h>
#include <errno.h>
#include <string.h>

#include "gzip.h"

/* Checked open with retry on interruption. */
int
xopen (const char *name, int flags, int mode)
{
  int fd;
  do
    fd = open (name, flags, mode);
  while (fd < 0 && errno == EINTR);
  return fd;
}

/* Checked stat. */
int
xstat (const char *name, struct stat *st)
{
  return stat (name, st);
}

/* Report an error against a path. */
void
progerror (const char *what)
{
  fprintf (stderr, "gzip: %s: %s\n", what, strerror (errno));
}

/* Fill the input buffer. */
long
fill_inbuf (int fd, char *buf, size_t len)
{
  ssize_t n = read (fd, buf, len);
  if (n < 0 && errno == EINTR)
    n = read (fd, buf, len);
  return (long) n;
}
