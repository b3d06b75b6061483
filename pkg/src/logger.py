"""
Logger Module
Console logging with severity levels for solver runs.
"""


class Logger:
    """
    Simple logger with different severity levels.
    """
    
    # ANSI color codes for terminal output
    COLORS = {
        'ERROR': '\033[91m',    # Red
        'WARNING': '\033[93m',  # Yellow
        'SUCCESS': '\033[92m',  # Green
        'INFO': '\033[94m',     # Blue
        'PROGRESS': '\033[96m', # Cyan
        'RESET': '\033[0m'      # Reset
    }
    
    def __init__(self, verbose: bool = False, quiet: bool = False):
        """
        Initialize logger.
        
        Args:
            verbose: Enable verbose output (debug and progress lines)
            quiet: Suppress everything; used when solvers run as a library
        """
        self.verbose = verbose
        self.quiet = quiet
    
    @classmethod
    def silent(cls) -> "Logger":
        """Logger that prints nothing."""
        return cls(verbose=False, quiet=True)
    
    def _format_message(self, level: str, message: str) -> str:
        """
        Format message with severity level.
        
        Args:
            level: Severity level (ERROR, WARNING, SUCCESS, INFO, PROGRESS)
            message: Message to format
            
        Returns:
            Formatted message string
        """
        color = self.COLORS.get(level, self.COLORS['RESET'])
        reset = self.COLORS['RESET']
        return f"{color}[{level}]{reset} {message}"
    
    def _emit(self, level: str, message: str) -> None:
        if not self.quiet:
            print(self._format_message(level, message), flush=True)
    
    def error(self, message: str) -> None:
        """Log error message."""
        self._emit('ERROR', message)
    
    def warning(self, message: str) -> None:
        """Log warning message."""
        self._emit('WARNING', message)
    
    def success(self, message: str) -> None:
        """Log success message."""
        self._emit('SUCCESS', message)
    
    def info(self, message: str) -> None:
        """Log info message."""
        self._emit('INFO', message)
    
    def progress(self, message: str) -> None:
        """Log a progress line (only in verbose mode)."""
        if self.verbose:
            self._emit('PROGRESS', message)
    
    def debug(self, message: str) -> None:
        """Log debug message (only in verbose mode)."""
        if self.verbose and not self.quiet:
            print(f"[DEBUG] {message}", flush=True)
