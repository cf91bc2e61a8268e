"""Exception hierarchy.

Everything raised deliberately by commitlens derives from :class:`CommitLensError`
so the CLI can map it to exit status 1.
"""


class CommitLensError(Exception):
    """Base class for operational errors."""


# taxonomy
class TagError(CommitLensError, ValueError):
    pass


class UnknownTag(TagError):
    def __init__(self, tag):
        super().__init__(f"unknown tag: {tag!r}")
        self.tag = tag


class InactiveTag(TagError):
    def __init__(self, tag, config):
        super().__init__(f"tag {tag!r} is not active under {config}")
        self.tag = tag
        self.config = config


class EmptyTagSet(TagError):
    def __init__(self):
        super().__init__("tag set is empty")


class EmptyAfterProjection(TagError):
    def __init__(self, tags, config):
        super().__init__(f"no tag of {sorted(tags)} survives projection to {config}")
        self.tags = tags
        self.config = config


# corpus
class NotARepository(CommitLensError):
    pass


class GitInvocationFailed(CommitLensError):
    pass


class MalformedLogOutput(CommitLensError):
    def __init__(self, line_number, reason=""):
        super().__init__(f"malformed git log output at line {line_number}: {reason}")
        self.line_number = line_number


class MissingDiffstat(CommitLensError):
    def __init__(self, sha):
        super().__init__(f"record {sha} has no diffstat")
        self.sha = sha


class NoSourceFiles(CommitLensError):
    pass


class ParseError(CommitLensError, ValueError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class SchemaVersionMismatch(CommitLensError):
    pass


class DuplicateSha(CommitLensError):
    def __init__(self, project, sha):
        super().__init__(f"duplicate sha {sha} in project {project!r}")
        self.project = project
        self.sha = sha


# features
class EmptyCorpus(CommitLensError, ValueError):
    pass


class NoParent(CommitLensError):
    pass


class RowCountMismatch(CommitLensError, ValueError):
    pass


# learn
class EmptyTrainingSet(CommitLensError, ValueError):
    pass


class LabelWidthMismatch(CommitLensError, ValueError):
    pass


class FingerprintMismatch(CommitLensError):
    pass


class WidthMismatch(CommitLensError, ValueError):
    pass


class LengthMismatch(CommitLensError, ValueError):
    pass


class NoTermColumns(CommitLensError):
    pass


class DatasetTooSmall(CommitLensError, ValueError):
    pass


class ModelLoadError(CommitLensError):
    pass


# stats
class MissingMetrics(CommitLensError):
    def __init__(self, sha):
        super().__init__(f"record {sha} has no metric snapshot")
        self.sha = sha


class BrokenParentChain(CommitLensError):
    def __init__(self, sha, missing):
        super().__init__(f"parent {missing} of {sha} is not in the dataset")
        self.sha = sha
        self.missing = missing


class UnknownMetric(CommitLensError, KeyError):
    def __init__(self, metric):
        super().__init__(metric)
        self.metric = metric

    def __str__(self):
        return f"unknown metric: {self.metric!r}"


class NoLabeledCompilability(CommitLensError):
    pass
