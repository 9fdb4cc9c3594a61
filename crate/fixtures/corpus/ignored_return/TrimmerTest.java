package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class TrimmerTest {
    @Test
    public void trimsAndUppercases() {
        assertEquals("ABC", new Trimmer().showBug("  abc "));
    }
}
