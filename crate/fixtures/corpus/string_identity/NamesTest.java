package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class NamesTest {
    @Test
    public void sameContentIsSameUser() {
        assertTrue(new Names().showBug("admin"));
    }
}
